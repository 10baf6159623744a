#include <doctest.h>

#include <cmath>
#include <set>
#include <tuple>

#include "cddr/mps.hpp"
#include "cddr/rng.hpp"

using namespace cddr;

namespace {

SparseLp tiny_lp() {
    SparseLp lp;
    lp.add_col(0.0, kInfinity);
    lp.add_col(); // free
    lp.add_col(-2.5, 7.25);
    lp.add_objective_term(0, 1.5);
    lp.add_objective_term(2, -0.125);
    const int r0 = lp.add_row(Relation::LessEqual, 3.0);
    lp.add_term(r0, 0, 1.0);
    lp.add_term(r0, 1, -2.0);
    const int r1 = lp.add_row(Relation::Equal, -0.75);
    lp.add_term(r1, 1, 0.3);
    lp.add_term(r1, 2, 1e-11);
    return lp;
}

std::multiset<std::tuple<int, int, double>> triplet_multiset(const SparseLp& lp) {
    std::multiset<std::tuple<int, int, double>> set;
    for (size_t r = 0; r < lp.rows.size(); ++r)
        for (const auto& [c, v] : lp.rows[r].terms) set.insert({static_cast<int>(r), c, v});
    return set;
}

} // namespace

TEST_CASE("single-row document has one ROWS entry besides the objective") {
    SparseLp lp;
    lp.add_col();
    const int r = lp.add_row(Relation::LessEqual, 1.0);
    lp.add_term(r, 0, 1.0);
    const std::string text = write_mps_string(lp, LpNames::defaults(lp));
    CHECK(text.find(" N  COST") != std::string::npos);
    CHECK(text.find(" L  R0000001") != std::string::npos);
    CHECK(text.find("ENDATA") != std::string::npos);
}

TEST_CASE("round trip reproduces rows, bounds and values exactly") {
    const SparseLp lp = tiny_lp();
    const LpNames names = LpNames::defaults(lp);
    const std::string text = write_mps_string(lp, names);
    const ParsedMps parsed = parse_mps_string(text);

    REQUIRE(parsed.lp.n_cols == lp.n_cols);
    REQUIRE(parsed.lp.rows.size() == lp.rows.size());
    for (size_t r = 0; r < lp.rows.size(); ++r) {
        CHECK(parsed.lp.rows[r].rel == lp.rows[r].rel);
        CHECK(parsed.lp.rows[r].rhs == lp.rows[r].rhs);
    }
    CHECK(triplet_multiset(parsed.lp) == triplet_multiset(lp));
    for (int j = 0; j < lp.n_cols; ++j) {
        CHECK(parsed.lp.lower[static_cast<size_t>(j)] == lp.lower[static_cast<size_t>(j)]);
        CHECK(parsed.lp.upper[static_cast<size_t>(j)] == lp.upper[static_cast<size_t>(j)]);
    }
    // objective conserved
    SparseLp a = lp, b = parsed.lp;
    a.canonicalize();
    b.canonicalize();
    CHECK(a.objective == b.objective);
}

TEST_CASE("rewriting a parsed file is byte-identical") {
    const SparseLp lp = tiny_lp();
    const LpNames names = LpNames::defaults(lp);
    const std::string once = write_mps_string(lp, names);
    const ParsedMps parsed = parse_mps_string(once);
    const std::string twice = write_mps_string(parsed.lp, parsed.names);
    CHECK(once == twice);
}

TEST_CASE("empty columns survive the round trip") {
    SparseLp lp;
    lp.add_col(0.0, 4.0); // never referenced
    lp.add_col();
    const int r = lp.add_row(Relation::LessEqual, 1.0);
    lp.add_term(r, 1, 2.0);
    const ParsedMps parsed = parse_mps_string(write_mps_string(lp, LpNames::defaults(lp)));
    REQUIRE(parsed.lp.n_cols == 2);
    CHECK(parsed.lp.upper[0] == 4.0);
}

TEST_CASE("name collisions are rejected") {
    SparseLp lp;
    lp.add_col();
    lp.add_col();
    LpNames names = LpNames::defaults(lp);
    names.col[1] = names.col[0];
    CHECK_THROWS_AS(write_mps_string(lp, names), Error);
}

TEST_CASE("negative and exponent-formatted values parse back exactly") {
    SplitMix64 rng(31);
    SparseLp lp;
    for (int j = 0; j < 4; ++j) lp.add_col(-rng.next_double() * 1e6, rng.next_double() * 1e-6);
    for (int r = 0; r < 3; ++r) {
        const int row = lp.add_row(r % 2 == 0 ? Relation::LessEqual : Relation::Equal,
                                   rng.uniform(-1e8, 1e8));
        for (int j = 0; j < 4; ++j) lp.add_term(row, j, rng.uniform(-1.0, 1.0) * std::pow(10.0, rng.uniform_int(-12, 12)));
    }
    const ParsedMps parsed = parse_mps_string(write_mps_string(lp, LpNames::defaults(lp)));
    CHECK(triplet_multiset(parsed.lp) == triplet_multiset(lp));
}

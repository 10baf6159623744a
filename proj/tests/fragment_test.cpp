#include <doctest.h>

#include "cddr/fragment.hpp"
#include "cddr/rng.hpp"

using namespace cddr;

TEST_CASE("padded stage-1 window indexes only the live coordinate") {
    const std::vector<int> d = {3};
    const FragmentSpace space(1, 2, d); // stages 0..1, stage 0 padded
    CHECK(space.size() == 3);
    CHECK(space.index(std::vector<int>{1, 2}) == 1);
    CHECK(space.fragment(1) == std::vector<int>{1, 2});
    CHECK_THROWS_AS(space.index(std::vector<int>{2, 2}), Error); // padded entry must be 1
}

TEST_CASE("two-stage window is mixed radix with the last stage fastest") {
    const std::vector<int> d = {2, 3};
    const FragmentSpace space(2, 2, d);
    CHECK(space.size() == 6);
    CHECK(space.index(std::vector<int>{1, 1}) == 0);
    CHECK(space.index(std::vector<int>{2, 3}) == 5);
    CHECK(space.index(std::vector<int>{1, 3}) == 2);
    CHECK_THROWS_AS(space.index(std::vector<int>{3, 1}), Error);
    CHECK_THROWS_AS(space.index(std::vector<int>{2, 4}), Error);
}

TEST_CASE("depth-zero and all-padding windows are singletons") {
    const std::vector<int> d = {2, 3};
    CHECK(FragmentSpace(1, 0, d).size() == 1);
    CHECK(FragmentSpace(0, 2, d).size() == 1);
    CHECK(FragmentSpace(0, 2, d).index(std::vector<int>{1, 1}) == 0);
}

TEST_CASE("encode/decode is a bijection over whole spaces") {
    SplitMix64 rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        const int N = rng.uniform_int(1, 6);
        std::vector<int> d;
        for (int t = 0; t < N; ++t) d.push_back(rng.uniform_int(1, 5));
        const int anchor = rng.uniform_int(1, N);
        const int depth = rng.uniform_int(1, 4);
        const FragmentSpace space(anchor, depth, d);
        REQUIRE(space.size() <= 100000);
        std::vector<int> frag(static_cast<size_t>(depth));
        for (std::int64_t idx = 0; idx < space.size(); ++idx) {
            space.unindex(idx, frag);
            CHECK(space.index(frag) == idx);
        }
    }
}

TEST_CASE("window index agrees with the full-trajectory lookup") {
    SplitMix64 rng(7);
    const std::vector<int> d = {2, 3, 2, 4};
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<int> traj(4);
        for (int s = 0; s < 4; ++s) traj[static_cast<size_t>(s)] = rng.uniform_int(1, d[static_cast<size_t>(s)]);
        const int anchor = rng.uniform_int(1, 4);
        const int depth = rng.uniform_int(1, 3);
        const FragmentSpace space(anchor, depth, d);
        std::vector<int> window(static_cast<size_t>(depth));
        for (int off = 0; off < depth; ++off) {
            const int stage = space.first_stage() + off;
            window[static_cast<size_t>(off)] = stage < 1 ? 1 : traj[static_cast<size_t>(stage - 1)];
        }
        CHECK(space.index(window) == space.index_in_trajectory(traj));
    }
}

TEST_CASE("tuple odometer visits every trajectory exactly once") {
    const std::vector<int> d = {2, 1, 3};
    std::vector<int> xi(3, 1);
    int count = 0;
    do {
        ++count;
    } while (next_tuple(xi, d));
    CHECK(count == 6);
    CHECK(trajectory_count(d, 3) == 6);
    CHECK(trajectory_count(d, 0) == 1);
}

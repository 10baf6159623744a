#include "cddr/mps.hpp"

#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace cddr {

namespace {

std::string fmt_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// two-field card: "    NAME1  NAME2  VALUE [NAME3 VALUE]"
void emit_entry(std::ostream& out, const std::string& a, const std::string& b,
                const std::string& v) {
    out << "    " << a;
    const size_t pad1 = a.size() < 10 ? 10 - a.size() : 1;
    out << std::string(pad1, ' ') << b;
    const size_t pad2 = b.size() < 10 ? 10 - b.size() : 1;
    out << std::string(pad2, ' ') << v << '\n';
}

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream is(line);
    std::string t;
    while (is >> t) toks.push_back(t);
    return toks;
}

} // namespace

LpNames LpNames::defaults(const SparseLp& lp) {
    LpNames names;
    names.col.reserve(static_cast<size_t>(lp.n_cols));
    char buf[24];
    for (int j = 0; j < lp.n_cols; ++j) {
        std::snprintf(buf, sizeof(buf), "C%07d", j + 1);
        names.col.emplace_back(buf);
    }
    names.row.reserve(lp.rows.size());
    for (size_t r = 0; r < lp.rows.size(); ++r) {
        std::snprintf(buf, sizeof(buf), "R%07zu", r + 1);
        names.row.emplace_back(buf);
    }
    return names;
}

void LpNames::validate(const SparseLp& lp) const {
    require(static_cast<int>(col.size()) == lp.n_cols, "LpNames: column name count mismatch");
    require(row.size() == lp.rows.size(), "LpNames: row name count mismatch");
    std::unordered_map<std::string, int> seen;
    seen[objective] = 1;
    for (const auto& n : row) {
        require(!n.empty(), "LpNames: empty row name");
        require(seen.emplace(n, 1).second, "LpNames: duplicate row name '" + n + "'");
    }
    std::unordered_map<std::string, int> seen_cols;
    for (const auto& n : col) {
        require(!n.empty(), "LpNames: empty column name");
        require(seen_cols.emplace(n, 1).second, "LpNames: duplicate column name '" + n + "'");
    }
}

void write_mps(const SparseLp& lp, const LpNames& names, std::ostream& out) {
    names.validate(lp);
    out << "NAME          " << names.problem << '\n';
    out << "ROWS\n";
    out << " N  " << names.objective << '\n';
    for (size_t r = 0; r < lp.rows.size(); ++r)
        out << (lp.rows[r].rel == Relation::Equal ? " E  " : " L  ") << names.row[r] << '\n';

    // column-major view with duplicate terms summed
    std::vector<std::vector<std::pair<int, double>>> bycol(static_cast<size_t>(lp.n_cols));
    {
        std::vector<std::map<int, double>> acc(static_cast<size_t>(lp.n_cols));
        for (const auto& [c, v] : lp.objective) acc[static_cast<size_t>(c)][-1] += v;
        for (size_t r = 0; r < lp.rows.size(); ++r)
            for (const auto& [c, v] : lp.rows[r].terms)
                acc[static_cast<size_t>(c)][static_cast<int>(r)] += v;
        for (int c = 0; c < lp.n_cols; ++c)
            for (const auto& [r, v] : acc[static_cast<size_t>(c)])
                if (v != 0.0) bycol[static_cast<size_t>(c)].emplace_back(r, v);
    }

    out << "COLUMNS\n";
    for (int c = 0; c < lp.n_cols; ++c) {
        if (bycol[static_cast<size_t>(c)].empty()) {
            // declare empty columns so the parser learns they exist
            emit_entry(out, names.col[static_cast<size_t>(c)], names.objective, "0");
            continue;
        }
        for (const auto& [r, v] : bycol[static_cast<size_t>(c)])
            emit_entry(out, names.col[static_cast<size_t>(c)],
                       r < 0 ? names.objective : names.row[static_cast<size_t>(r)], fmt_value(v));
    }

    out << "RHS\n";
    for (size_t r = 0; r < lp.rows.size(); ++r)
        if (lp.rows[r].rhs != 0.0)
            emit_entry(out, "RHS", names.row[r], fmt_value(lp.rows[r].rhs));

    out << "RANGES\n";

    out << "BOUNDS\n";
    for (int c = 0; c < lp.n_cols; ++c) {
        const double lo = lp.lower[static_cast<size_t>(c)], up = lp.upper[static_cast<size_t>(c)];
        const auto& name = names.col[static_cast<size_t>(c)];
        if (lo == -kInfinity && up == kInfinity) {
            out << " FR BND       " << name << '\n';
        } else if (lo == up) {
            out << " FX BND       " << name << "  " << fmt_value(lo) << '\n';
        } else {
            if (lo == -kInfinity)
                out << " MI BND       " << name << '\n';
            else
                out << " LO BND       " << name << "  " << fmt_value(lo) << '\n';
            if (up == kInfinity)
                out << " PL BND       " << name << '\n';
            else
                out << " UP BND       " << name << "  " << fmt_value(up) << '\n';
        }
    }
    out << "ENDATA\n";
}

std::string write_mps_string(const SparseLp& lp, const LpNames& names) {
    std::ostringstream os;
    write_mps(lp, names, os);
    return os.str();
}

ParsedMps parse_mps(std::istream& in) {
    ParsedMps result;
    SparseLp& lp = result.lp;
    LpNames& names = result.names;
    names.objective.clear();

    std::unordered_map<std::string, int> row_index; // objective row -> -1
    std::unordered_map<std::string, int> col_index;

    enum class Section { None, Rows, Columns, Rhs, Ranges, Bounds, Done };
    Section section = Section::None;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '*') continue;
        const auto toks = tokenize(line);
        if (toks.empty()) continue;

        if (line[0] != ' ') { // section header
            const std::string& head = toks[0];
            if (head == "NAME") {
                names.problem = toks.size() > 1 ? toks[1] : "";
            } else if (head == "ROWS") {
                section = Section::Rows;
            } else if (head == "COLUMNS") {
                section = Section::Columns;
            } else if (head == "RHS") {
                section = Section::Rhs;
            } else if (head == "RANGES") {
                section = Section::Ranges;
            } else if (head == "BOUNDS") {
                section = Section::Bounds;
            } else if (head == "ENDATA") {
                section = Section::Done;
                break;
            } else {
                fail("mps: unknown section '" + head + "' at line " + std::to_string(lineno));
            }
            continue;
        }

        switch (section) {
            case Section::Rows: {
                require(toks.size() == 2, "mps: malformed ROWS card at line " + std::to_string(lineno));
                const std::string& type = toks[0];
                const std::string& name = toks[1];
                if (type == "N") {
                    require(names.objective.empty(), "mps: multiple objective rows");
                    names.objective = name;
                    row_index[name] = -1;
                } else if (type == "L" || type == "E") {
                    require(row_index.emplace(name, static_cast<int>(lp.rows.size())).second,
                            "mps: duplicate row name '" + name + "'");
                    lp.add_row(type == "L" ? Relation::LessEqual : Relation::Equal, 0.0);
                    names.row.push_back(name);
                } else {
                    fail("mps: unsupported row type '" + type + "' (only N/L/E are produced)");
                }
                break;
            }
            case Section::Columns: {
                require(toks.size() == 3 || toks.size() == 5,
                        "mps: malformed COLUMNS card at line " + std::to_string(lineno));
                const std::string& cname = toks[0];
                auto it = col_index.find(cname);
                int c;
                if (it == col_index.end()) {
                    c = lp.add_col(0.0, kInfinity); // MPS default bounds
                    col_index.emplace(cname, c);
                    names.col.push_back(cname);
                } else {
                    c = it->second;
                }
                for (size_t k = 1; k + 1 < toks.size(); k += 2) {
                    auto rit = row_index.find(toks[k]);
                    require(rit != row_index.end(), "mps: unknown row '" + toks[k] + "'");
                    const double v = std::stod(toks[k + 1]);
                    if (rit->second < 0)
                        lp.add_objective_term(c, v);
                    else
                        lp.add_term(rit->second, c, v);
                }
                break;
            }
            case Section::Rhs: {
                require(toks.size() == 3 || toks.size() == 5,
                        "mps: malformed RHS card at line " + std::to_string(lineno));
                for (size_t k = 1; k + 1 < toks.size(); k += 2) {
                    auto rit = row_index.find(toks[k]);
                    require(rit != row_index.end() && rit->second >= 0,
                            "mps: RHS for unknown row '" + toks[k] + "'");
                    lp.rows[static_cast<size_t>(rit->second)].rhs = std::stod(toks[k + 1]);
                }
                break;
            }
            case Section::Ranges:
                fail("mps: RANGES entries are not supported");
            case Section::Bounds: {
                require(toks.size() >= 3, "mps: malformed BOUNDS card at line " + std::to_string(lineno));
                const std::string& type = toks[0];
                auto cit = col_index.find(toks[2]);
                require(cit != col_index.end(), "mps: bound for unknown column '" + toks[2] + "'");
                const size_t c = static_cast<size_t>(cit->second);
                auto value = [&]() {
                    require(toks.size() >= 4, "mps: bound card missing value at line " +
                                                  std::to_string(lineno));
                    return std::stod(toks[3]);
                };
                if (type == "LO") lp.lower[c] = value();
                else if (type == "UP") lp.upper[c] = value();
                else if (type == "FX") lp.lower[c] = lp.upper[c] = value();
                else if (type == "FR") { lp.lower[c] = -kInfinity; lp.upper[c] = kInfinity; }
                else if (type == "MI") lp.lower[c] = -kInfinity;
                else if (type == "PL") lp.upper[c] = kInfinity;
                else fail("mps: unsupported bound type '" + type + "'");
                break;
            }
            default:
                fail("mps: data card outside of a section at line " + std::to_string(lineno));
        }
    }
    require(section == Section::Done, "mps: missing ENDATA");
    require(!names.objective.empty(), "mps: missing objective row");
    lp.validate();
    return result;
}

ParsedMps parse_mps_string(const std::string& text) {
    std::istringstream is(text);
    return parse_mps(is);
}

} // namespace cddr

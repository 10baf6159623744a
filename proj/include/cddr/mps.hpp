#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cddr/lp.hpp"

namespace cddr {

/// Row/column names used by the MPS writer and the plugin solution format.
/// Defaulted names are R0000001... / C0000001... when none are supplied.
struct LpNames {
    std::string problem = "CDDR";
    std::string objective = "COST";
    std::vector<std::string> col;
    std::vector<std::string> row;

    static LpNames defaults(const SparseLp& lp);
    void validate(const SparseLp& lp) const; // sizes match, no collisions
};

/// Writes fixed-format MPS (ROWS / COLUMNS / RHS / RANGES / BOUNDS sections,
/// fields starting at columns 2, 5, 15, 25, 40, 50). Values are printed with
/// 17 significant digits so a round trip reproduces every coefficient
/// exactly. Only <= and = rows exist in SparseLp, so RANGES is always empty
/// and the file never contains G rows.
void write_mps(const SparseLp& lp, const LpNames& names, std::ostream& out);
std::string write_mps_string(const SparseLp& lp, const LpNames& names);

struct ParsedMps {
    SparseLp lp;
    LpNames names;
};

/// Parses the subset of MPS emitted by write_mps (N/L/E rows; LO/UP/FX/FR/MI/
/// PL bounds; empty RANGES). Whitespace-tolerant so long semantic names are
/// accepted.
ParsedMps parse_mps(std::istream& in);
ParsedMps parse_mps_string(const std::string& text);

} // namespace cddr

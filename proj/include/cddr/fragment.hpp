#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cddr/common.hpp"

namespace cddr {

/// Index set of trajectory fragments (xi_{p}, ..., xi_{anchor}) of a given
/// depth ending at a given anchor stage. Stage values are 1-based; stages
/// with index <= 0 exist only as padding and always carry the value 1, so
/// they contribute a factor of 1 to the size and are never stored.
///
/// Flat indexing is 0-based mixed radix with the most recent stage varying
/// fastest. This ordering is frozen: coefficient tables, LP column layouts
/// and file formats all key off it.
class FragmentSpace {
public:
    FragmentSpace() = default;

    /// `cardinalities[t-1]` is the number of values stage t can take.
    /// `anchor` may be <= 0 (all-padding space of size 1, used by the
    /// depth-(mu-1) index sets rooted before stage 1). `depth` may be 0.
    FragmentSpace(int anchor, int depth, std::span<const int> cardinalities);

    int anchor() const { return anchor_; }
    int depth() const { return depth_; }
    /// First stage covered by the fragment window; may be <= 0.
    int first_stage() const { return anchor_ - depth_ + 1; }

    std::int64_t size() const { return size_; }

    /// Cardinality of the stage at window position `offset` (0-based from
    /// first_stage()); padded stages report 1.
    int radix(int offset) const;

    /// `fragment` has length depth() covering stages first_stage()..anchor(),
    /// each entry 1-based; entries for padded stages must equal 1.
    std::int64_t index(std::span<const int> fragment) const;

    /// Inverse of index(); writes depth() entries.
    void unindex(std::int64_t idx, std::span<int> out) const;
    std::vector<int> fragment(std::int64_t idx) const;

    /// Flat index of the window ending at anchor() taken from a full
    /// trajectory prefix (trajectory[s-1] = xi_s, length >= anchor()).
    std::int64_t index_in_trajectory(std::span<const int> trajectory) const;

    bool operator==(const FragmentSpace& o) const {
        return anchor_ == o.anchor_ && depth_ == o.depth_ && radices_ == o.radices_;
    }

private:
    int anchor_ = 0;
    int depth_ = 0;
    std::vector<int> radices_; // stages max(1, first_stage())..anchor_ only
    std::int64_t size_ = 1;
};

/// Advances a 1-based trajectory tuple over stages 1..xi.size() with the
/// given cardinalities, last stage fastest. Returns false after the last
/// tuple wraps back to all ones. Start from all ones and use as a do/while
/// odometer.
bool next_tuple(std::span<int> xi, std::span<const int> cardinalities);

/// Number of trajectories of length `t` (product of the first t cardinalities).
std::int64_t trajectory_count(std::span<const int> cardinalities, int t);

} // namespace cddr

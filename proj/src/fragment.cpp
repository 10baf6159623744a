#include "cddr/fragment.hpp"

#include <algorithm>

namespace cddr {

FragmentSpace::FragmentSpace(int anchor, int depth, std::span<const int> cardinalities)
    : anchor_(anchor), depth_(depth) {
    require(depth >= 0, "FragmentSpace: negative depth");
    const int first = anchor - depth + 1;
    for (int s = std::max(1, first); s <= anchor; ++s) {
        require(s <= static_cast<int>(cardinalities.size()),
                "FragmentSpace: stage " + std::to_string(s) + " beyond cardinality table");
        const int d = cardinalities[s - 1];
        require(d >= 1, "FragmentSpace: cardinality must be >= 1 at stage " + std::to_string(s));
        radices_.push_back(d);
        size_ *= d;
    }
}

int FragmentSpace::radix(int offset) const {
    require(offset >= 0 && offset < depth_, "FragmentSpace::radix: offset out of range");
    const int stage = first_stage() + offset;
    if (stage < 1) return 1;
    return radices_[static_cast<size_t>(stage - std::max(1, first_stage()))];
}

std::int64_t FragmentSpace::index(std::span<const int> fragment) const {
    require(static_cast<int>(fragment.size()) == depth_,
            "FragmentSpace::index: fragment length != depth");
    std::int64_t idx = 0;
    size_t r = 0;
    for (int off = 0; off < depth_; ++off) {
        const int stage = first_stage() + off;
        const int v = fragment[static_cast<size_t>(off)];
        if (stage < 1) {
            require(v == 1, "FragmentSpace::index: padded stage entry must be 1");
            continue;
        }
        const int d = radices_[r++];
        require(v >= 1 && v <= d, "FragmentSpace::index: entry out of radix range at stage " +
                                      std::to_string(stage));
        idx = idx * d + (v - 1);
    }
    return idx;
}

void FragmentSpace::unindex(std::int64_t idx, std::span<int> out) const {
    require(static_cast<int>(out.size()) == depth_, "FragmentSpace::unindex: bad output length");
    require(idx >= 0 && idx < size_, "FragmentSpace::unindex: index out of range");
    for (int off = depth_ - 1; off >= 0; --off) {
        const int stage = first_stage() + off;
        if (stage < 1) {
            out[static_cast<size_t>(off)] = 1;
            continue;
        }
        const int d = radices_[static_cast<size_t>(stage - std::max(1, first_stage()))];
        out[static_cast<size_t>(off)] = static_cast<int>(idx % d) + 1;
        idx /= d;
    }
}

std::vector<int> FragmentSpace::fragment(std::int64_t idx) const {
    std::vector<int> out(static_cast<size_t>(depth_));
    unindex(idx, out);
    return out;
}

std::int64_t FragmentSpace::index_in_trajectory(std::span<const int> trajectory) const {
    require(static_cast<int>(trajectory.size()) >= anchor_,
            "FragmentSpace::index_in_trajectory: trajectory shorter than anchor");
    std::int64_t idx = 0;
    size_t r = 0;
    for (int stage = std::max(1, first_stage()); stage <= anchor_; ++stage) {
        const int d = radices_[r++];
        const int v = trajectory[static_cast<size_t>(stage - 1)];
        require(v >= 1 && v <= d, "FragmentSpace::index_in_trajectory: entry out of range");
        idx = idx * d + (v - 1);
    }
    return idx;
}

bool next_tuple(std::span<int> xi, std::span<const int> cardinalities) {
    for (int pos = static_cast<int>(xi.size()) - 1; pos >= 0; --pos) {
        if (xi[static_cast<size_t>(pos)] < cardinalities[static_cast<size_t>(pos)]) {
            ++xi[static_cast<size_t>(pos)];
            return true;
        }
        xi[static_cast<size_t>(pos)] = 1;
    }
    return false;
}

std::int64_t trajectory_count(std::span<const int> cardinalities, int t) {
    require(t >= 0 && t <= static_cast<int>(cardinalities.size()),
            "trajectory_count: length out of range");
    std::int64_t n = 1;
    for (int s = 0; s < t; ++s) n *= cardinalities[static_cast<size_t>(s)];
    return n;
}

} // namespace cddr

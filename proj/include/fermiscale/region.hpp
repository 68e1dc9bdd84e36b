#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fermiscale {

/// A subsystem: an ordered, duplicate-free set of integer lattice sites.
/// Axis-aligned boxes keep their edge lengths as a hint so the geometric
/// form factor can use the closed-form Dirichlet product.
class Region {
public:
    static Region box(std::vector<int> lengths, std::vector<int> offset = {}) {
        const int d = static_cast<int>(lengths.size());
        if (offset.empty()) offset.assign(d, 0);
        if (static_cast<int>(offset.size()) != d)
            throw std::invalid_argument("Region::box: offset/lengths dimension mismatch");
        for (int l : lengths)
            if (l < 1) throw std::invalid_argument("Region::box: lengths must be >= 1");
        Region r;
        r.dimension_ = d;
        r.rect_hint_ = lengths;
        r.offset_ = offset;
        std::vector<int> site(d, 0);
        // row-major enumeration of the box
        int count = 1;
        for (int l : lengths) count *= l;
        r.sites_.reserve(static_cast<std::size_t>(count) * d);
        for (int i = 0; i < count; ++i) {
            int rem = i;
            for (int a = d - 1; a >= 0; --a) {
                site[a] = rem % lengths[a];
                rem /= lengths[a];
            }
            for (int a = 0; a < d; ++a) r.sites_.push_back(offset[a] + site[a]);
        }
        return r;
    }

    static Region from_sites(int dimension, const std::vector<std::vector<int>>& sites) {
        Region r;
        r.dimension_ = dimension;
        std::set<std::vector<int>> seen;
        for (const auto& s : sites) {
            if (static_cast<int>(s.size()) != dimension)
                throw std::invalid_argument("Region::from_sites: site dimension mismatch");
            if (!seen.insert(s).second)
                throw std::invalid_argument("Region::from_sites: duplicate site");
            r.sites_.insert(r.sites_.end(), s.begin(), s.end());
        }
        return r;
    }

    int dimension() const { return dimension_; }
    int site_count() const {
        return dimension_ == 0 ? 0 : static_cast<int>(sites_.size()) / dimension_;
    }
    bool empty() const { return sites_.empty(); }

    std::span<const int> site(int i) const {
        return {sites_.data() + static_cast<std::size_t>(i) * dimension_,
                static_cast<std::size_t>(dimension_)};
    }

    const std::optional<std::vector<int>>& rect_hint() const { return rect_hint_; }

    /// Lower corner of the box; empty for explicit site lists.
    const std::vector<int>& box_offset() const { return offset_; }

    /// True when every site lies in [0, N_a) per axis.
    bool within(std::span<const int> dims) const {
        if (static_cast<int>(dims.size()) != dimension_) return false;
        for (int i = 0; i < site_count(); ++i) {
            auto s = site(i);
            for (int a = 0; a < dimension_; ++a)
                if (s[a] < 0 || s[a] >= dims[a]) return false;
        }
        return true;
    }

    /// All lattice sites not in this region.
    Region complement(std::span<const int> dims) const {
        if (!within(dims))
            throw std::invalid_argument("Region::complement: region exceeds lattice bounds");
        std::set<std::vector<int>> mine;
        for (int i = 0; i < site_count(); ++i) {
            auto s = site(i);
            mine.emplace(s.begin(), s.end());
        }
        const int d = dimension_;
        std::vector<std::vector<int>> rest;
        std::vector<int> cur(d, 0);
        int total = 1;
        for (int n : dims) total *= n;
        for (int i = 0; i < total; ++i) {
            int rem = i;
            for (int a = d - 1; a >= 0; --a) {
                cur[a] = rem % dims[a];
                rem /= dims[a];
            }
            if (!mine.count(cur)) rest.push_back(cur);
        }
        return from_sites(d, rest);
    }

private:
    int dimension_ = 0;
    std::vector<int> sites_;                      // flat, row-major per site
    std::optional<std::vector<int>> rect_hint_;   // box edge lengths, if a box
    std::vector<int> offset_;
};

} // namespace fermiscale

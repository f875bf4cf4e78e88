#pragma once

#include <limits>
#include <stdexcept>
#include <vector>

namespace mfe {

// Half-open rectangle (index_lo, index_hi] x (value_lo, value_hi] on the strip
// (0,1] x R. value_hi may be +infinity.
struct Rect {
    double index_lo = 0.0;
    double index_hi = 1.0;
    double value_lo = 0.0;
    double value_hi = std::numeric_limits<double>::infinity();
};

// Finite union of pairwise disjoint rectangles.
class RegionSet {
public:
    explicit RegionSet(std::vector<Rect> rects) : rects_(std::move(rects)) {
        for (const Rect& r : rects_) {
            if (!(0.0 <= r.index_lo && r.index_lo < r.index_hi && r.index_hi <= 1.0))
                throw std::invalid_argument("RegionSet: index interval must satisfy 0 <= a < b <= 1");
            if (!(r.value_lo < r.value_hi))
                throw std::invalid_argument("RegionSet: value interval must satisfy c < d");
        }
        for (std::size_t i = 0; i < rects_.size(); ++i) {
            for (std::size_t j = i + 1; j < rects_.size(); ++j) {
                const Rect& p = rects_[i];
                const Rect& q = rects_[j];
                const bool index_overlap = !(p.index_hi <= q.index_lo || q.index_hi <= p.index_lo);
                const bool value_overlap = !(p.value_hi <= q.value_lo || q.value_hi <= p.value_lo);
                if (index_overlap && value_overlap)
                    throw std::invalid_argument("RegionSet: rectangles must be pairwise disjoint");
            }
        }
    }

    const std::vector<Rect>& rects() const { return rects_; }

private:
    std::vector<Rect> rects_;
};

// One point of a (normalized) pattern on the strip.
struct PatternPoint {
    double index_fraction = 0.0;
    double value = 0.0;
};

} // namespace mfe

#include "autobox/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "autobox/error.hpp"

namespace autobox {

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1), internal_(n, 0.0f) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }

    int find(int x) noexcept {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    // Joins two roots; returns the surviving root.
    int join(int a, int b, float weight) noexcept {
        if (size_[a] < size_[b] || (size_[a] == size_[b] && b < a)) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        internal_[a] = std::max({internal_[a], internal_[b], weight});
        return a;
    }

    int size(int root) const noexcept { return size_[root]; }
    float internal(int root) const noexcept { return internal_[root]; }

private:
    std::vector<int> parent_;
    std::vector<int> size_;
    std::vector<float> internal_;
};

struct Edge {
    float w;
    int a;
    int b;
};

std::vector<float> gaussian_kernel(double sigma) {
    const int radius = static_cast<int>(std::ceil(4.0 * sigma));
    std::vector<float> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-0.5 * (i / sigma) * (i / sigma));
        k[i + radius] = static_cast<float>(v);
        sum += v;
    }
    for (auto& v : k) v = static_cast<float>(v / sum);
    return k;
}

// Smoothed planar float copy of the image, three channels interleaved.
std::vector<float> smooth(const RasterImage& img, double sigma) {
    const int w = img.width(), h = img.height();
    const auto src = img.data();
    std::vector<float> out(src.begin(), src.end());
    if (sigma <= 0.0) return out;

    const auto kernel = gaussian_kernel(sigma);
    const int radius = static_cast<int>(kernel.size() / 2);
    std::vector<float> tmp(out.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c) {
                float acc = 0.0f;
                for (int k = -radius; k <= radius; ++k) {
                    const int xx = std::clamp(x + k, 0, w - 1);
                    acc += kernel[k + radius] * out[(static_cast<std::size_t>(y) * w + xx) * 3 + c];
                }
                tmp[(static_cast<std::size_t>(y) * w + x) * 3 + c] = acc;
            }
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c) {
                float acc = 0.0f;
                for (int k = -radius; k <= radius; ++k) {
                    const int yy = std::clamp(y + k, 0, h - 1);
                    acc += kernel[k + radius] * tmp[(static_cast<std::size_t>(yy) * w + x) * 3 + c];
                }
                out[(static_cast<std::size_t>(y) * w + x) * 3 + c] = acc;
            }
        }
    }
    return out;
}

} // namespace

Segmentation oversegment(const RasterImage& img, const SegmentationConfig& config) {
    if (config.scale <= 0.0) throw Error(ErrorCode::InvalidArgument, "segmentation scale must be positive");
    if (config.min_segment_size < 1) throw Error(ErrorCode::InvalidArgument, "min_segment_size must be >= 1");

    const int w = img.width(), h = img.height();
    const auto px = smooth(img, config.sigma);
    auto dist = [&](int p, int q) {
        const float dr = px[p * 3] - px[q * 3];
        const float dg = px[p * 3 + 1] - px[q * 3 + 1];
        const float db = px[p * 3 + 2] - px[q * 3 + 2];
        return std::sqrt(dr * dr + dg * dg + db * db);
    };

    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(w) * h * 2);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int p = y * w + x;
            if (x + 1 < w) edges.push_back({dist(p, p + 1), p, p + 1});
            if (y + 1 < h) edges.push_back({dist(p, p + w), p, p + w});
        }
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& l, const Edge& r) {
        if (l.w != r.w) return l.w < r.w;
        if (l.a != r.a) return l.a < r.a;
        return l.b < r.b;
    });

    DisjointSets sets(static_cast<std::size_t>(w) * h);
    auto threshold = [&](int root) {
        return sets.internal(root) + static_cast<float>(config.scale / sets.size(root));
    };
    for (const auto& e : edges) {
        const int a = sets.find(e.a), b = sets.find(e.b);
        if (a == b) continue;
        if (e.w <= std::min(threshold(a), threshold(b))) sets.join(a, b, e.w);
    }
    for (const auto& e : edges) {
        const int a = sets.find(e.a), b = sets.find(e.b);
        if (a == b) continue;
        if (sets.size(a) < config.min_segment_size || sets.size(b) < config.min_segment_size) {
            sets.join(a, b, e.w);
        }
    }

    Segmentation seg;
    seg.width = w;
    seg.height = h;
    seg.labels.assign(static_cast<std::size_t>(w) * h, -1);
    std::vector<int> dense(static_cast<std::size_t>(w) * h, -1);
    for (int p = 0; p < w * h; ++p) {
        const int root = sets.find(p);
        if (dense[root] < 0) dense[root] = seg.count++;
        seg.labels[p] = dense[root];
    }
    return seg;
}

} // namespace autobox

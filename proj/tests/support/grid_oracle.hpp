// Exhaustive Bayes update on a dense Bloch-ball grid with Bures-uniform cell
// weights. Deliberately independent of the particle filter: plain arrays,
// its own likelihood accumulation, log-space weights.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

class GridBayes {
  public:
    explicit GridBayes(int cells_per_axis = 80) {
        const int m = cells_per_axis;
        const double h = 2.0 / m;
        centers_.reserve(static_cast<std::size_t>(m) * m * m / 2);
        for (int ix = 0; ix < m; ++ix) {
            for (int iy = 0; iy < m; ++iy) {
                for (int iz = 0; iz < m; ++iz) {
                    const std::array<double, 3> s{-1.0 + (ix + 0.5) * h,
                                                  -1.0 + (iy + 0.5) * h,
                                                  -1.0 + (iz + 0.5) * h};
                    const double r2 = s[0] * s[0] + s[1] * s[1] + s[2] * s[2];
                    if (r2 >= 1.0 - 1e-9) continue;
                    centers_.push_back(s);
                    // Bures volume element on the ball is 1/sqrt(1 - r^2)
                    // times Lebesgue (cells share the same Lebesgue volume).
                    log_weights_.push_back(-0.5 * std::log(1.0 - r2));
                }
            }
        }
    }

    std::size_t cell_count() const { return centers_.size(); }

    void observe(const std::array<double, 3>& axis, std::int64_t count0,
                 std::int64_t count1) {
        for (std::size_t i = 0; i < centers_.size(); ++i) {
            const auto& s = centers_[i];
            double p0 =
                0.5 * (1.0 + axis[0] * s[0] + axis[1] * s[1] + axis[2] * s[2]);
            p0 = std::min(1.0, std::max(0.0, p0));
            double ll = 0.0;
            if (count0 > 0)
                ll += p0 > 0.0 ? count0 * std::log(p0)
                               : -std::numeric_limits<double>::infinity();
            if (count1 > 0)
                ll += p0 < 1.0 ? count1 * std::log(1.0 - p0)
                               : -std::numeric_limits<double>::infinity();
            log_weights_[i] += ll;
        }
    }

    std::array<double, 3> mean() const {
        double max_lw = -std::numeric_limits<double>::infinity();
        for (double lw : log_weights_) max_lw = std::max(max_lw, lw);
        double norm = 0.0;
        std::array<double, 3> m{0.0, 0.0, 0.0};
        for (std::size_t i = 0; i < centers_.size(); ++i) {
            const double w = std::exp(log_weights_[i] - max_lw);
            norm += w;
            m[0] += w * centers_[i][0];
            m[1] += w * centers_[i][1];
            m[2] += w * centers_[i][2];
        }
        return {m[0] / norm, m[1] / norm, m[2] / norm};
    }

  private:
    std::vector<std::array<double, 3>> centers_;
    std::vector<double> log_weights_;
};

}  // namespace oracle

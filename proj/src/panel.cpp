#include "mvarch/panel.hpp"

#include <cstdio>
#include <set>
#include <stdexcept>

#include "mvarch/errors.hpp"

namespace mvarch {

void validate_panel(const ReturnPanel& panel) {
    const auto T = panel.returns.rows();
    const auto N = panel.returns.cols();
    if (T < 2) throw std::invalid_argument("panel: need at least 2 observations");
    if (N < 1) throw std::invalid_argument("panel: need at least 1 asset");
    if (static_cast<Eigen::Index>(panel.dates.size()) != T)
        throw std::invalid_argument("panel: date index length does not match rows");
    if (static_cast<Eigen::Index>(panel.labels.size()) != N)
        throw std::invalid_argument("panel: label count does not match columns");
    if (!panel.returns.allFinite())
        throw std::invalid_argument("panel: returns contain non-finite values");
    std::set<std::string> seen(panel.labels.begin(), panel.labels.end());
    if (static_cast<Eigen::Index>(seen.size()) != N)
        throw std::invalid_argument("panel: duplicate asset labels");
    for (Eigen::Index t = 1; t < T; ++t)
        if (!(panel.dates[t - 1] < panel.dates[t]))
            throw OrderingError("panel: dates not strictly ascending at row " +
                                std::to_string(t) + " (" + panel.dates[t] + ")");
}

std::vector<std::string> default_labels(Eigen::Index n_assets) {
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(n_assets));
    for (Eigen::Index i = 0; i < n_assets; ++i)
        labels.push_back("A" + std::to_string(i + 1));
    return labels;
}

std::vector<std::string> default_dates(Eigen::Index n_obs) {
    // Plain consecutive calendar days; the calendar is whatever rows exist.
    std::vector<std::string> dates;
    dates.reserve(static_cast<std::size_t>(n_obs));
    int y = 2000, m = 1, d = 3;
    static const int mdays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    for (Eigen::Index t = 0; t < n_obs; ++t) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
        dates.emplace_back(buf);
        int dm = mdays[m - 1];
        if (m == 2 && ((y % 4 == 0 && y % 100 != 0) || y % 400 == 0)) dm = 29;
        if (++d > dm) {
            d = 1;
            if (++m > 12) { m = 1; ++y; }
        }
    }
    return dates;
}

}  // namespace mvarch

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace mvarch {

/// T x N matrix of daily returns with an aligned date index and asset labels.
/// Row t holds the return over (t-1, t]; dates are ISO-8601 strings and
/// strictly ascending.
struct ReturnPanel {
    Eigen::MatrixXd returns;
    std::vector<std::string> dates;
    std::vector<std::string> labels;

    Eigen::Index n_obs() const { return returns.rows(); }
    Eigen::Index n_assets() const { return returns.cols(); }
};

/// Throws std::invalid_argument / OrderingError when the panel invariants are
/// violated (shape mismatch, T < 2, NaN entries, duplicate labels, unsorted dates).
void validate_panel(const ReturnPanel& panel);

/// Default labels A1..AN for synthetic panels.
std::vector<std::string> default_labels(Eigen::Index n_assets);

/// Default dates: consecutive days starting 2000-01-03.
std::vector<std::string> default_dates(Eigen::Index n_obs);

}  // namespace mvarch

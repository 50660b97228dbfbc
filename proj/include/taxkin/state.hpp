#pragma once

#include <Eigen/Dense>

namespace taxkin {

/// Population fractions x_j^alpha stored as an n x m matrix (class, sector).
class PopulationState {
public:
    PopulationState() = default;
    PopulationState(int classes, int sectors) : values_(Eigen::MatrixXd::Zero(classes, sectors)) {}
    explicit PopulationState(Eigen::MatrixXd values) : values_(std::move(values)) {}

    int classes() const { return static_cast<int>(values_.rows()); }
    int sectors() const { return static_cast<int>(values_.cols()); }

    double operator()(int cls, int sector) const { return values_(cls, sector); }
    double& operator()(int cls, int sector) { return values_(cls, sector); }

    const Eigen::MatrixXd& values() const { return values_; }
    Eigen::MatrixXd& values() { return values_; }

    double total() const { return values_.sum(); }
    Eigen::VectorXd class_marginals() const { return values_.rowwise().sum(); }
    Eigen::VectorXd sector_marginals() const { return values_.colwise().sum().transpose(); }

    /// Global income mu = sum_j r_j sum_alpha x_j^alpha.
    double global_income(const Eigen::VectorXd& incomes) const { return incomes.dot(class_marginals()); }

private:
    Eigen::MatrixXd values_;
};

}  // namespace taxkin

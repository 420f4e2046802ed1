#pragma once

#include <Eigen/Core>

#include <string>

namespace deepc {

/// Time-indexed block signal with a fixed channel count.
///
/// Samples are stored as the columns of a (channels x length) matrix, so one
/// time step is contiguous in memory and stacking a window of consecutive
/// samples is a single gather.
class Trajectory
{
 public:
    Trajectory() = default;

    Trajectory(int channels, int length)
        : samples_(Eigen::MatrixXd::Zero(channels, length))
    {
        require_shape(channels, length);
    }

    /// Takes ownership of a (channels x length) sample matrix.
    explicit Trajectory(Eigen::MatrixXd samples) : samples_(std::move(samples))
    {
        require_shape(static_cast<int>(samples_.rows()), static_cast<int>(samples_.cols()));
    }

    int channels() const { return static_cast<int>(samples_.rows()); }
    int length() const { return static_cast<int>(samples_.cols()); }
    bool empty() const { return samples_.size() == 0; }

    Eigen::MatrixXd& data() { return samples_; }
    const Eigen::MatrixXd& data() const { return samples_; }

    Eigen::VectorXd sample(int t) const { return samples_.col(t); }
    double& at(int ch, int t) { return samples_(ch, t); }
    double at(int ch, int t) const { return samples_(ch, t); }

    /// [w(start); w(start+1); ...; w(start+count-1)] as one column vector.
    Eigen::VectorXd stacked(int start, int count) const;
    Eigen::VectorXd stacked() const { return stacked(0, length()); }

    /// Inverse of stacked(): splits a column vector into channel-sized samples.
    static Trajectory from_stacked(const Eigen::VectorXd& stack, int channels);

    Trajectory segment(int start, int count) const
    {
        return Trajectory(samples_.middleCols(start, count));
    }

    // CSV layout: header "t,ch0,ch1,...", one row per time step.
    static Trajectory load_csv(const std::string& path);
    void store_csv(const std::string& path) const;

 private:
    static void require_shape(int channels, int length);

    Eigen::MatrixXd samples_;
};

/// Per-channel interval bounds, lo(i) <= hi(i).
struct Box
{
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    int size() const { return static_cast<int>(lo.size()); }
    bool valid() const { return lo.size() == hi.size() && (lo.array() <= hi.array()).all(); }
    bool contains(const Eigen::VectorXd& v) const
    {
        return (v.array() >= lo.array()).all() && (v.array() <= hi.array()).all();
    }
    /// Box shrunk about its center by `factor` (factor in [0,1]).
    Box shrunk(double factor) const;

    static Box symmetric(int channels, double magnitude);
};

}  // namespace deepc

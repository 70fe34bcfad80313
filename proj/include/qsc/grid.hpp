#pragma once

#include <stdexcept>
#include <vector>

namespace qsc {

// Partition of [0,T]. Cell k carries the noise mode with indicator
// chi_[t_k, t_{k+1}), squared norm dt(k). One mode per step.
class ModeGrid {
public:
    ModeGrid(double horizon, int n_steps)
    {
        if (horizon <= 0.0)
            throw std::invalid_argument("ModeGrid: horizon must be positive");
        if (n_steps < 0)
            throw std::invalid_argument("ModeGrid: negative step count");
        times_.resize(static_cast<size_t>(n_steps) + 1);
        for (int k = 0; k <= n_steps; ++k)
            times_[static_cast<size_t>(k)] = horizon * static_cast<double>(k) / n_steps;
        times_.back() = horizon;
    }

    explicit ModeGrid(std::vector<double> times) : times_(std::move(times))
    {
        if (times_.size() < 1 || times_.front() != 0.0)
            throw std::invalid_argument("ModeGrid: times must start at 0");
        for (size_t i = 1; i < times_.size(); ++i)
            if (times_[i] <= times_[i - 1])
                throw std::invalid_argument("ModeGrid: times must be strictly increasing");
    }

    int n_modes() const { return static_cast<int>(times_.size()) - 1; }
    int n_steps() const { return n_modes(); }
    double horizon() const { return times_.back(); }

    double time(int k) const { return times_.at(static_cast<size_t>(k)); }

    double dt(int k) const
    {
        if (k < 0 || k >= n_steps())
            throw std::out_of_range("ModeGrid::dt: step out of range");
        return times_[static_cast<size_t>(k) + 1] - times_[static_cast<size_t>(k)];
    }

    const std::vector<double>& times() const { return times_; }

    bool operator==(const ModeGrid& o) const { return times_ == o.times_; }

private:
    std::vector<double> times_;
};

} // namespace qsc

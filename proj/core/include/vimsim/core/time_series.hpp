#pragma once

#include <string>
#include <vector>

namespace vimsim {

// Named per-unit traces over a strictly increasing time axis.
class TimeSeries {
  public:
    TimeSeries() = default;
    explicit TimeSeries(std::vector<std::string> channel_names);

    void append(double t, const std::vector<double>& values);

    const std::vector<double>& times() const { return times_; }
    const std::vector<std::string>& channel_names() const { return names_; }
    std::size_t size() const { return times_.size(); }
    std::size_t channel_count() const { return names_.size(); }

    const std::vector<double>& channel(const std::string& name) const;
    bool has_channel(const std::string& name) const;
    double value(const std::string& name, std::size_t row) const;
    double last(const std::string& name) const;

    // CSV with a time_s first column, full double precision.
    void write_csv(const std::string& path) const;

  private:
    std::vector<double> times_;
    std::vector<std::string> names_;
    std::vector<std::vector<double>> channels_;
};

}  // namespace vimsim

#include "vimsim/core/time_series.hpp"

#include <cstdio>
#include <filesystem>
#include <stdexcept>

namespace vimsim {

TimeSeries::TimeSeries(std::vector<std::string> channel_names)
    : names_(std::move(channel_names)), channels_(names_.size()) {}

void TimeSeries::append(double t, const std::vector<double>& values) {
    if (values.size() != names_.size()) {
        throw std::invalid_argument("TimeSeries::append: channel count mismatch");
    }
    if (!times_.empty() && !(t > times_.back())) {
        throw std::invalid_argument("TimeSeries::append: time axis must be strictly increasing");
    }
    times_.push_back(t);
    for (std::size_t i = 0; i < values.size(); ++i) channels_[i].push_back(values[i]);
}

bool TimeSeries::has_channel(const std::string& name) const {
    for (const auto& n : names_)
        if (n == name) return true;
    return false;
}

const std::vector<double>& TimeSeries::channel(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return channels_[i];
    throw std::out_of_range("TimeSeries: no channel named " + name);
}

double TimeSeries::value(const std::string& name, std::size_t row) const {
    return channel(name).at(row);
}

double TimeSeries::last(const std::string& name) const {
    const auto& c = channel(name);
    if (c.empty()) throw std::out_of_range("TimeSeries: empty channel " + name);
    return c.back();
}

void TimeSeries::write_csv(const std::string& path) const {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.string() + ".tmp";
    std::FILE* f = std::fopen(tmp.string().c_str(), "w");
    if (!f) throw std::runtime_error("TimeSeries: cannot open " + tmp.string());
    std::fputs("time_s", f);
    for (const auto& n : names_) std::fprintf(f, ",%s", n.c_str());
    std::fputc('\n', f);
    for (std::size_t r = 0; r < times_.size(); ++r) {
        std::fprintf(f, "%.17g", times_[r]);
        for (const auto& c : channels_) std::fprintf(f, ",%.17g", c[r]);
        std::fputc('\n', f);
    }
    std::fclose(f);
    fs::rename(tmp, target);
}

}  // namespace vimsim

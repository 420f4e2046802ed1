#include "deepc/trajectory.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace deepc {

void Trajectory::require_shape(int channels, int length)
{
    if (channels < 1 || length < 1) {
        throw std::invalid_argument("Trajectory requires channels >= 1 and length >= 1, got " +
                                    std::to_string(channels) + " x " + std::to_string(length));
    }
}

Eigen::VectorXd Trajectory::stacked(int start, int count) const
{
    if (start < 0 || count < 0 || start + count > length()) {
        throw std::out_of_range("Trajectory::stacked window [" + std::to_string(start) + ", " +
                                std::to_string(start + count) + ") exceeds length " +
                                std::to_string(length()));
    }
    // samples are column-major, so the window is one contiguous block
    return Eigen::Map<const Eigen::VectorXd>(samples_.data() + start * channels(),
                                             static_cast<Eigen::Index>(count) * channels());
}

Trajectory Trajectory::from_stacked(const Eigen::VectorXd& stack, int channels)
{
    if (channels < 1 || stack.size() % channels != 0) {
        throw std::invalid_argument("stacked vector of size " + std::to_string(stack.size()) +
                                    " is not a multiple of " + std::to_string(channels) +
                                    " channels");
    }
    const int length = static_cast<int>(stack.size()) / channels;
    Eigen::MatrixXd samples =
        Eigen::Map<const Eigen::MatrixXd>(stack.data(), channels, length);
    return Trajectory(std::move(samples));
}

namespace {

std::vector<double> parse_csv_row(const std::string& line)
{
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        out.push_back(std::stod(cell));
    }
    return out;
}

}  // namespace

Trajectory Trajectory::load_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open trajectory file: " + path);
    }
    std::string header;
    if (!std::getline(in, header)) {
        throw std::runtime_error("empty trajectory file: " + path);
    }
    const int columns = static_cast<int>(std::count(header.begin(), header.end(), ',')) + 1;
    if (columns < 2 || header.rfind("t,", 0) != 0) {
        throw std::runtime_error("bad trajectory header in " + path + ": " + header);
    }
    const int channels = columns - 1;

    std::vector<double> values;
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto row = parse_csv_row(line);
        if (static_cast<int>(row.size()) != columns) {
            throw std::runtime_error("ragged row " + std::to_string(rows) + " in " + path);
        }
        values.insert(values.end(), row.begin() + 1, row.end());  // drop the t column
        ++rows;
    }
    if (rows == 0) {
        throw std::runtime_error("no samples in " + path);
    }
    Eigen::MatrixXd samples(channels, rows);
    for (int t = 0; t < rows; ++t) {
        for (int ch = 0; ch < channels; ++ch) {
            samples(ch, t) = values[static_cast<size_t>(t) * channels + ch];
        }
    }
    return Trajectory(std::move(samples));
}

void Trajectory::store_csv(const std::string& path) const
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write trajectory file: " + path);
    }
    out << "t";
    for (int ch = 0; ch < channels(); ++ch) {
        out << ",ch" << ch;
    }
    out << "\n";
    char buf[32];
    for (int t = 0; t < length(); ++t) {
        out << t;
        for (int ch = 0; ch < channels(); ++ch) {
            std::snprintf(buf, sizeof buf, "%.17g", samples_(ch, t));
            out << ',' << buf;
        }
        out << "\n";
    }
}

Box Box::shrunk(double factor) const
{
    Eigen::VectorXd center = 0.5 * (lo + hi);
    Eigen::VectorXd half = 0.5 * factor * (hi - lo);
    return Box{center - half, center + half};
}

Box Box::symmetric(int channels, double magnitude)
{
    return Box{Eigen::VectorXd::Constant(channels, -magnitude),
               Eigen::VectorXd::Constant(channels, magnitude)};
}

}  // namespace deepc

#include "deepc/lti_plant.hpp"

#include "deepc/rng.hpp"

#include <Eigen/QR>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace deepc {

void LtiSystem::validate() const
{
    const auto n = A.rows();
    if (A.cols() != n || n < 1) {
        throw std::invalid_argument("A must be square and non-empty");
    }
    if (B.rows() != n || B.cols() < 1) {
        throw std::invalid_argument("B must have n rows and at least one column");
    }
    if (C.cols() != n || C.rows() < 1) {
        throw std::invalid_argument("C must have n columns and at least one row");
    }
    if (D.rows() != C.rows() || D.cols() != B.cols()) {
        throw std::invalid_argument("D must be p x m");
    }
}

bool LtiSystem::is_controllable(double rank_tolerance) const
{
    validate();
    const int n = state_dim();
    const int m = input_dim();
    Eigen::MatrixXd ctrb(n, static_cast<Eigen::Index>(n) * m);
    Eigen::MatrixXd AkB = B;
    for (int k = 0; k < n; ++k) {
        ctrb.middleCols(static_cast<Eigen::Index>(k) * m, m) = AkB;
        if (k + 1 < n) AkB = A * AkB;
    }
    return numerical_rank(ctrb, rank_tolerance) == n;
}

SimulationResult simulate(const LtiSystem& sys, const Eigen::VectorXd& x0, const Trajectory& u)
{
    sys.validate();
    if (x0.size() != sys.state_dim()) {
        throw std::invalid_argument("initial state of length " + std::to_string(x0.size()) +
                                    ", expected " + std::to_string(sys.state_dim()));
    }
    if (u.channels() != sys.input_dim()) {
        throw std::invalid_argument("input trajectory has " + std::to_string(u.channels()) +
                                    " channels, plant expects " +
                                    std::to_string(sys.input_dim()));
    }
    const int T = u.length();
    SimulationResult out{Trajectory(sys.state_dim(), T), Trajectory(sys.output_dim(), T),
                         Eigen::VectorXd(sys.state_dim())};
    Eigen::VectorXd x = x0;
    for (int t = 0; t < T; ++t) {
        out.state.data().col(t) = x;
        out.output.data().col(t) = sys.C * x + sys.D * u.data().col(t);
        x = sys.A * x + sys.B * u.data().col(t);
    }
    out.final_state = x;
    return out;
}

std::pair<Trajectory, Trajectory> collect_data(const LtiSystem& sys, int T, const Box& input_law,
                                               const Box& noise_law, std::uint64_t seed,
                                               const Eigen::VectorXd* x0)
{
    sys.validate();
    if (T < 1) {
        throw std::invalid_argument("collection length must be >= 1");
    }
    if (input_law.size() != sys.input_dim() || !input_law.valid()) {
        throw std::invalid_argument("input law must be a valid box over the input channels");
    }
    if (noise_law.size() != sys.output_dim() || !noise_law.valid()) {
        throw std::invalid_argument("noise law must be a valid box over the output channels");
    }

    Rng rng(seed);
    Trajectory u(sys.input_dim(), T);
    for (int t = 0; t < T; ++t) {
        for (int ch = 0; ch < sys.input_dim(); ++ch) {
            u.at(ch, t) = rng.uniform(input_law.lo(ch), input_law.hi(ch));
        }
    }

    const Eigen::VectorXd start =
        x0 ? *x0 : Eigen::VectorXd::Zero(sys.state_dim()).eval();
    SimulationResult sim = simulate(sys, start, u);

    Trajectory y = sim.output;
    for (int t = 0; t < T; ++t) {
        for (int ch = 0; ch < sys.output_dim(); ++ch) {
            y.at(ch, t) += rng.uniform(noise_law.lo(ch), noise_law.hi(ch));
        }
    }
    return {std::move(u), std::move(y)};
}

std::optional<int> observability_index(const LtiSystem& sys, double rank_tolerance)
{
    sys.validate();
    const int n = sys.state_dim();
    const int p = sys.output_dim();
    Eigen::MatrixXd stack(static_cast<Eigen::Index>(n) * p, n);
    Eigen::MatrixXd CAk = sys.C;
    for (int l = 1; l <= n; ++l) {
        stack.middleRows(static_cast<Eigen::Index>(l - 1) * p, p) = CAk;
        if (numerical_rank(stack.topRows(static_cast<Eigen::Index>(l) * p), rank_tolerance) == n) {
            return l;
        }
        CAk = CAk * sys.A;
    }
    return std::nullopt;
}

StructuralFactors structural_factors(const LtiSystem& sys, int depth)
{
    sys.validate();
    if (depth < 1) {
        throw std::invalid_argument("factor depth must be >= 1");
    }
    const int n = sys.state_dim();
    const int m = sys.input_dim();
    const int p = sys.output_dim();

    StructuralFactors out;
    out.depth = depth;
    out.observability.resize(static_cast<Eigen::Index>(p) * depth, n);
    Eigen::MatrixXd CAk = sys.C;
    for (int i = 0; i < depth; ++i) {
        out.observability.middleRows(static_cast<Eigen::Index>(i) * p, p) = CAk;
        if (i + 1 < depth) CAk = CAk * sys.A;
    }

    // markov parameters D, CB, CAB, ... fill the lower block triangle
    out.convolution = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p) * depth,
                                            static_cast<Eigen::Index>(m) * depth);
    std::vector<Eigen::MatrixXd> markov(depth);
    markov[0] = sys.D;
    Eigen::MatrixXd AkB = sys.B;  // A^(k-1) B
    for (int k = 1; k < depth; ++k) {
        markov[k] = sys.C * AkB;
        if (k + 1 < depth) AkB = sys.A * AkB;
    }
    for (int i = 0; i < depth; ++i) {
        for (int j = 0; j <= i; ++j) {
            out.convolution.block(static_cast<Eigen::Index>(i) * p,
                                  static_cast<Eigen::Index>(j) * m, p, m) = markov[i - j];
        }
    }
    return out;
}

namespace {

void write_matrix(std::ofstream& out, const char* name, const Eigen::MatrixXd& m)
{
    out << name << "\n";
    char buf[32];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            out << (j ? " " : "") << buf;
        }
        out << "\n";
    }
}

Eigen::MatrixXd read_matrix(std::istream& in, const std::string& name, Eigen::Index rows,
                            Eigen::Index cols, const std::string& path)
{
    std::string tag;
    if (!(in >> tag) || tag != name) {
        throw std::runtime_error("plant file " + path + ": expected matrix '" + name + "', got '" +
                                 tag + "'");
    }
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            if (!(in >> m(i, j))) {
                throw std::runtime_error("plant file " + path + ": truncated matrix " + name);
            }
        }
    }
    return m;
}

}  // namespace

LtiSystem LtiSystem::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open plant file: " + path);
    }
    std::string line;
    // skip comment lines, then expect "n <int>" etc.
    std::stringstream body;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') continue;
        body << line << "\n";
    }
    int n = 0, m = 0, p = 0;
    std::string tag;
    auto read_dim = [&](const char* name, int& value) {
        if (!(body >> tag) || tag != name || !(body >> value) || value < 1) {
            throw std::runtime_error("plant file " + path + ": bad or missing dimension " + name);
        }
    };
    read_dim("n", n);
    read_dim("m", m);
    read_dim("p", p);

    LtiSystem sys;
    sys.A = read_matrix(body, "A", n, n, path);
    sys.B = read_matrix(body, "B", n, m, path);
    sys.C = read_matrix(body, "C", p, n, path);
    sys.D = read_matrix(body, "D", p, m, path);
    sys.validate();
    return sys;
}

void LtiSystem::store(const std::string& path) const
{
    validate();
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write plant file: " + path);
    }
    out << "# discrete-time LTI plant (x+ = A x + B u, y = C x + D u)\n";
    out << "n " << state_dim() << "\n";
    out << "m " << input_dim() << "\n";
    out << "p " << output_dim() << "\n";
    write_matrix(out, "A", A);
    write_matrix(out, "B", B);
    write_matrix(out, "C", C);
    write_matrix(out, "D", D);
}

}  // namespace deepc

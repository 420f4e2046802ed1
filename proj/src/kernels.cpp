#include "deepc/kernels.hpp"

#include <atomic>
#include <cstring>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace deepc::kernels {

namespace {
std::atomic<int> g_threads{0};

void require_rows(Eigen::Index a, Eigen::Index b, const char* what)
{
    if (a != b) {
        throw std::invalid_argument(std::string(what) + ": row mismatch " + std::to_string(a) +
                                    " vs " + std::to_string(b));
    }
}
}  // namespace

int set_threads(int n)
{
    return g_threads.exchange(n < 0 ? 0 : n);
}

int configured_threads()
{
    return g_threads.load();
}

bool openmp_enabled()
{
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

#ifdef _OPENMP
namespace {
int active_threads()
{
    const int cap = g_threads.load();
    return cap > 0 ? cap : omp_get_max_threads();
}
}  // namespace
#endif

// Column j of the Gram matrix needs A^T (w .* A.col(j)); looping j keeps the
// arithmetic identical between the serial and parallel paths.

Eigen::MatrixXd weighted_gram_serial(const Eigen::MatrixXd& A, const Eigen::VectorXd& w)
{
    require_rows(A.rows(), w.size(), "weighted_gram");
    const Eigen::Index d = A.cols();
    Eigen::MatrixXd G(d, d);
    Eigen::VectorXd scaled(A.rows());
    for (Eigen::Index j = 0; j < d; ++j) {
        scaled = w.cwiseProduct(A.col(j));
        G.col(j).noalias() = A.transpose() * scaled;
    }
    return G;
}

Eigen::MatrixXd weighted_gram_parallel(const Eigen::MatrixXd& A, const Eigen::VectorXd& w)
{
    require_rows(A.rows(), w.size(), "weighted_gram");
    const Eigen::Index d = A.cols();
    Eigen::MatrixXd G(d, d);
#ifdef _OPENMP
#pragma omp parallel num_threads(active_threads())
    {
        Eigen::VectorXd scaled(A.rows());
#pragma omp for schedule(static)
        for (Eigen::Index j = 0; j < d; ++j) {
            scaled = w.cwiseProduct(A.col(j));
            G.col(j).noalias() = A.transpose() * scaled;
        }
    }
#else
    G = weighted_gram_serial(A, w);
#endif
    return G;
}

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& A, const Eigen::VectorXd& w)
{
#ifdef _OPENMP
    return weighted_gram_parallel(A, w);
#else
    return weighted_gram_serial(A, w);
#endif
}

Eigen::MatrixXd weighted_gram_serial(const Eigen::MatrixXd& A, const Eigen::MatrixXd& P)
{
    require_rows(A.rows(), P.rows(), "weighted_gram");
    require_rows(P.rows(), P.cols(), "weighted_gram: P must be square");
    const Eigen::Index d = A.cols();
    Eigen::MatrixXd PA = P * A;
    Eigen::MatrixXd G(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        G.col(j).noalias() = A.transpose() * PA.col(j);
    }
    return G;
}

Eigen::MatrixXd weighted_gram_parallel(const Eigen::MatrixXd& A, const Eigen::MatrixXd& P)
{
    require_rows(A.rows(), P.rows(), "weighted_gram");
    require_rows(P.rows(), P.cols(), "weighted_gram: P must be square");
    const Eigen::Index d = A.cols();
    Eigen::MatrixXd PA = P * A;
    Eigen::MatrixXd G(d, d);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(active_threads())
    for (Eigen::Index j = 0; j < d; ++j) {
        G.col(j).noalias() = A.transpose() * PA.col(j);
    }
#else
    for (Eigen::Index j = 0; j < d; ++j) {
        G.col(j).noalias() = A.transpose() * PA.col(j);
    }
#endif
    return G;
}

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& A, const Eigen::MatrixXd& P)
{
#ifdef _OPENMP
    return weighted_gram_parallel(A, P);
#else
    return weighted_gram_serial(A, P);
#endif
}

// With column-major samples every depth-window is contiguous, so a Hankel
// column is a single memcpy.

void hankel_gather_serial(const Eigen::MatrixXd& samples, int depth,
                          Eigen::Ref<Eigen::MatrixXd> dst)
{
    const Eigen::Index ch = samples.rows();
    const Eigen::Index n_cols = samples.cols() - depth + 1;
    if (dst.rows() != ch * depth || dst.cols() != n_cols) {
        throw std::invalid_argument("hankel_gather: destination shape mismatch");
    }
    const std::size_t window = static_cast<std::size_t>(ch) * depth;
    for (Eigen::Index j = 0; j < n_cols; ++j) {
        std::memcpy(dst.col(j).data(), samples.data() + j * ch, window * sizeof(double));
    }
}

void hankel_gather_parallel(const Eigen::MatrixXd& samples, int depth,
                            Eigen::Ref<Eigen::MatrixXd> dst)
{
    const Eigen::Index ch = samples.rows();
    const Eigen::Index n_cols = samples.cols() - depth + 1;
    if (dst.rows() != ch * depth || dst.cols() != n_cols) {
        throw std::invalid_argument("hankel_gather: destination shape mismatch");
    }
    const std::size_t window = static_cast<std::size_t>(ch) * depth;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(active_threads())
    for (Eigen::Index j = 0; j < n_cols; ++j) {
        std::memcpy(dst.col(j).data(), samples.data() + j * ch, window * sizeof(double));
    }
#else
    hankel_gather_serial(samples, depth, dst);
#endif
}

void hankel_gather(const Eigen::MatrixXd& samples, int depth, Eigen::Ref<Eigen::MatrixXd> dst)
{
#ifdef _OPENMP
    hankel_gather_parallel(samples, depth, dst);
#else
    hankel_gather_serial(samples, depth, dst);
#endif
}

}  // namespace deepc::kernels

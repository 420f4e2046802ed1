#pragma once

#include <Eigen/Core>

namespace deepc::kernels {

// Data-parallel building blocks behind library assembly and QP condensation.
// Each kernel ships in two variants: a serial reference and an OpenMP version
// that performs the identical per-column arithmetic, so the two results are
// bit-equal and the reference doubles as the test oracle. The dispatching
// entry points pick the OpenMP path when it is compiled in and enabled.

/// Thread cap for the parallel kernels (0 = OpenMP default). Returns old cap.
int set_threads(int n);
int configured_threads();
bool openmp_enabled();

/// G = A^T diag(w) A, w.size() == A.rows().
Eigen::MatrixXd weighted_gram_serial(const Eigen::MatrixXd& A, const Eigen::VectorXd& w);
Eigen::MatrixXd weighted_gram_parallel(const Eigen::MatrixXd& A, const Eigen::VectorXd& w);
Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& A, const Eigen::VectorXd& w);

/// G = A^T P A for symmetric P, P.rows() == A.rows().
Eigen::MatrixXd weighted_gram_serial(const Eigen::MatrixXd& A, const Eigen::MatrixXd& P);
Eigen::MatrixXd weighted_gram_parallel(const Eigen::MatrixXd& A, const Eigen::MatrixXd& P);
Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& A, const Eigen::MatrixXd& P);

/// Window gather: dst.col(j) = vec(samples.cols(j .. j+depth-1)).
/// samples is (channels x T), dst is (channels*depth x T-depth+1).
void hankel_gather_serial(const Eigen::MatrixXd& samples, int depth,
                          Eigen::Ref<Eigen::MatrixXd> dst);
void hankel_gather_parallel(const Eigen::MatrixXd& samples, int depth,
                            Eigen::Ref<Eigen::MatrixXd> dst);
void hankel_gather(const Eigen::MatrixXd& samples, int depth, Eigen::Ref<Eigen::MatrixXd> dst);

}  // namespace deepc::kernels

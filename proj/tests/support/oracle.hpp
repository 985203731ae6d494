// Reference implementations used as test oracles. They share no code with
// the library beyond the AST and matrix containers: embedding, evaluation
// and eigenvalues are computed with Eigen.
#pragma once

#include <Eigen/Dense>

#include "qhl/ast.hpp"
#include "qhl/context.hpp"
#include "qhl/matrix.hpp"
#include "qhl/tables.hpp"

namespace oracle {

using EMatrix = Eigen::MatrixXcd;

EMatrix to_eigen(const qhl::CMatrix& m);
qhl::CMatrix from_eigen(const EMatrix& m);

/// Ascending eigenvalues of the Hermitian part of m.
std::vector<double> eigenvalues(const qhl::CMatrix& m);
double min_eigenvalue(const qhl::CMatrix& m);

/// op on the listed factors (in order), identity elsewhere, by enumerating
/// basis digits.
EMatrix embed(const EMatrix& op, const std::vector<std::size_t>& positions,
              const std::vector<std::size_t>& dims);

/// Direct density-matrix interpreter. Loops run until the in-loop trace
/// drops below 1e-15 or 100000 iterations pass.
EMatrix run(const qhl::VarContext& ctx, const qhl::Command& c, const EMatrix& rho,
            const qhl::Tables& tables);

/// Max entry difference between a library matrix and an Eigen one.
double distance(const qhl::CMatrix& a, const EMatrix& b);

}  // namespace oracle

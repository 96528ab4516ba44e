#include "conedioph/posdef.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cd {

namespace {

std::string real17(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

PosDefForm::PosDefForm(Eigen::MatrixXd entries, double det_target)
    : m_(std::move(entries)), det_target_(det_target) {
  if (m_.rows() != m_.cols() || m_.rows() == 0)
    throw std::invalid_argument("PosDefForm: matrix must be square");
  double scale = m_.cwiseAbs().maxCoeff();
  if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale)
    throw std::invalid_argument("PosDefForm: matrix not symmetric");
  m_ = 0.5 * (m_ + m_.transpose().eval());
  Eigen::LLT<Eigen::MatrixXd> llt(m_);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("PosDefForm: matrix not positive definite");
  factor_ = llt.matrixL();
  inv_factor_ = factor_.triangularView<Eigen::Lower>().solve(
      Eigen::MatrixXd::Identity(m_.rows(), m_.cols()));
  if (det_target_ <= 0.0) throw std::invalid_argument("PosDefForm: det target must be positive");
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < factor_.rows(); ++i) logdet += 2.0 * std::log(factor_(i, i));
  double det = std::exp(logdet);
  if (std::abs(det - det_target_) > kDetTol * det_target_)
    throw std::invalid_argument("PosDefForm: determinant off target");
}

PosDefForm PosDefForm::from_factor(Eigen::MatrixXd f, Eigen::MatrixXd f_inv,
                                   double det_target) {
  if (f.rows() != f.cols() || f.rows() == 0 || f_inv.rows() != f.rows() ||
      f_inv.cols() != f.cols())
    throw std::invalid_argument("PosDefForm: factor must be square");
  if (det_target <= 0.0) throw std::invalid_argument("PosDefForm: det target must be positive");
  if ((f * f_inv - Eigen::MatrixXd::Identity(f.rows(), f.cols())).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument("PosDefForm: inverse factor inconsistent");
  PosDefForm q;
  q.m_ = f * f.transpose();
  q.m_ = 0.5 * (q.m_ + q.m_.transpose().eval());
  q.factor_ = std::move(f);
  q.inv_factor_ = std::move(f_inv);
  q.det_target_ = det_target;
  double det = q.factor_.determinant();
  if (std::abs(det * det - det_target) > kDetTol * det_target)
    throw std::invalid_argument("PosDefForm: determinant off target");
  return q;
}

PosDefForm PosDefForm::congruent(const Eigen::MatrixXd& b) const {
  double db = b.determinant();
  return PosDefForm(b.transpose() * m_ * b, det_target_ * db * db);
}

PosDefForm PosDefForm::dual() const {
  return from_factor(inv_factor_.transpose(), factor_.transpose(), 1.0 / det_target_);
}

nlohmann::json PosDefForm::to_json() const {
  nlohmann::json j;
  j["dim"] = dim();
  j["det_target"] = real17(det_target_);
  std::vector<std::string> entries;
  entries.reserve(dim() * dim());
  for (Eigen::Index i = 0; i < m_.rows(); ++i)
    for (Eigen::Index k = 0; k < m_.cols(); ++k) entries.push_back(real17(m_(i, k)));
  j["entries"] = entries;
  return j;
}

PosDefForm PosDefForm::from_json(const nlohmann::json& j) {
  std::size_t s = j.at("dim").get<std::size_t>();
  double dt = std::stod(j.at("det_target").get<std::string>());
  const auto& e = j.at("entries");
  if (e.size() != s * s) throw std::invalid_argument("PosDefForm: bad entry count");
  Eigen::MatrixXd m(s, s);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t k = 0; k < s; ++k) m(i, k) = std::stod(e[i * s + k].get<std::string>());
  return PosDefForm(std::move(m), dt);
}

double distance(const PosDefForm& q1, const PosDefForm& q2) {
  if (q1.dim() != q2.dim()) throw std::invalid_argument("distance: dimension mismatch");
  if (std::abs(q1.det_target() - q2.det_target()) >
      kDetTol * std::max(q1.det_target(), q2.det_target()))
    throw std::invalid_argument("distance: determinant targets differ");
  // Relative eigenvalues are the squared singular values of F1^{-1} F2.
  Eigen::MatrixXd a = q1.inv_factor() * q2.factor();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    double l = 2.0 * std::log(svd.singularValues()(i));
    sum += l * l;
  }
  return std::sqrt(sum);
}

double busemann_vector(const Eigen::VectorXd& v, const PosDefForm& q) {
  if (v.norm() == 0.0) throw std::invalid_argument("busemann_vector: zero vector");
  double qv = q(v);
  if (qv <= 0.0) throw std::invalid_argument("busemann_vector: Q(v) must be positive");
  return std::sqrt(2.0) * std::log(qv);
}

double busemann_ambient_vector(const Eigen::VectorXd& v, const PosDefForm& q) {
  if (v.norm() == 0.0) throw std::invalid_argument("busemann_ambient_vector: zero vector");
  const double s = static_cast<double>(q.dim());
  return std::sqrt(s / (s - 1.0)) * std::log(q(v));
}

double busemann_ambient_dual(const Eigen::VectorXd& v, const PosDefForm& q) {
  return busemann_ambient_vector(v, q.dual());
}

double busemann_ambient(int i, const PosDefForm& q) {
  const int s = static_cast<int>(q.dim());
  if (i < 1 || i > s - 1) throw std::out_of_range("busemann_ambient: wall index");
  Eigen::MatrixXd block = q.matrix().bottomRightCorner(i, i);
  double logdet = std::log(block.determinant());
  return std::sqrt(static_cast<double>(s) / ((s - i) * static_cast<double>(i))) * logdet;
}

PosDefForm ambient_ray(std::size_t s, int i, double t) {
  if (i < 1 || i >= static_cast<int>(s)) throw std::out_of_range("ambient_ray: wall index");
  const double sd = static_cast<double>(s);
  double lam = std::sqrt(i / (sd * (sd - i)));
  double mu = std::sqrt((sd - i) / (sd * i));
  Eigen::VectorXd h(s);
  for (std::size_t k = 0; k < s; ++k)
    h(k) = (k < s - static_cast<std::size_t>(i)) ? std::exp(lam * t / 2.0) : std::exp(-mu * t / 2.0);
  return PosDefForm::from_factor(Eigen::MatrixXd(h.asDiagonal()),
                                 Eigen::MatrixXd(h.cwiseInverse().asDiagonal()), 1.0);
}

PosDefForm frame_ray(const CuspFrame& frame, double t) {
  const Eigen::Index s = static_cast<Eigen::Index>(frame.dim());
  Eigen::VectorXd h = Eigen::VectorXd::Ones(s);
  h(0) = std::exp(-t / (2.0 * std::sqrt(2.0)));
  h(s - 1) = std::exp(t / (2.0 * std::sqrt(2.0)));
  // G(-t) = Pi^{-T} diag(h)^2 Pi^{-1}; both factors are exact products of
  // well-conditioned pieces.
  Eigen::MatrixXd f = frame.Pi_inv.transpose() * Eigen::MatrixXd(h.asDiagonal());
  Eigen::MatrixXd f_inv = Eigen::MatrixXd(h.cwiseInverse().asDiagonal()) * frame.Pi.transpose();
  double dpi = frame.Pi.determinant();
  return PosDefForm::from_factor(std::move(f), std::move(f_inv), 1.0 / (dpi * dpi));
}

double busemann_limit_check(double f_closed,
                            const std::function<PosDefForm(double)>& ray,
                            const PosDefForm& q, double T) {
  return std::abs((distance(q, ray(T)) - T) - f_closed);
}

double odist(const RatVec& v, const RatVec& w, const RatSymForm& l) {
  Rational b = l.bilinear(v, w);
  if (b == 0) throw std::domain_error("odist: horoballs are not opposite");
  return 2.0 * std::sqrt(2.0) * std::log(std::abs(to_double(b)));
}

double odist(const Eigen::VectorXd& v, const Eigen::VectorXd& w, const Eigen::MatrixXd& l) {
  double b = v.dot(l * w);
  if (b == 0.0) throw std::domain_error("odist: horoballs are not opposite");
  return 2.0 * std::sqrt(2.0) * std::log(std::abs(b));
}

}  // namespace cd

#pragma once

#include "conedioph/chart.hpp"
#include "conedioph/forms.hpp"
#include "conedioph/wittframe.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <vector>

namespace cd {

/// A relatively compact region of cone lines, either everything, an
/// axis-aligned box in the unipotent chart of a frame, or an angular cap
/// around a center line. Box and cap regions must stay away from the chart
/// hyperplane at infinity.
class ConeRegion {
 public:
  static ConeRegion all();
  static ConeRegion box(const CuspFrame* chart, Eigen::VectorXd lo, Eigen::VectorXd hi);
  static ConeRegion cap(Eigen::VectorXd center, double max_angle);

  bool contains(const Eigen::VectorXd& ambient_line) const;
  bool contains(const IsotropicVector& v) const;

  /// Chart Lebesgue volume; only defined for boxes.
  double chart_volume() const;
  bool is_all() const { return kind_ == Kind::All; }

 private:
  enum class Kind { All, Box, Cap };
  Kind kind_ = Kind::All;
  const CuspFrame* chart_ = nullptr;
  Eigen::VectorXd lo_, hi_;      // box
  Eigen::VectorXd center_;       // cap
  double max_angle_ = 0.0;
};

/// All primitive integer vectors (p, q) with q(p) = q^2 and 0 < q <= q_max
/// on the cone of a suspended form, normalized (last nonzero coordinate is
/// q > 0), sorted by (q, lexicographic p), optionally filtered to a region.
/// The quadric form q must be positive definite (compact quadric);
/// enumeration partitions the q-range across threads deterministically.
std::vector<IsotropicVector> enumerate_isotropic(const RatSymForm& l, long q_max,
                                                 const ConeRegion& region = ConeRegion::all(),
                                                 int threads = 1);

struct CountingHistogram {
  double base = 2.0;
  std::vector<std::uint64_t> bins;  // bins[k] = N(k; O), contiguous from k = 0
  double fitted_slope = 0.0;
  double fit_r2 = 0.0;

  std::uint64_t total() const;
  nlohmann::json to_json() const;
};

/// N(k; O) = #{points in O with q in [a^k, a^{k+1})}.
CountingHistogram counting_histogram(const std::vector<IsotropicVector>& points, double base,
                                     const ConeRegion& region = ConeRegion::all());

/// Least-squares fit of log_a N(k; O) against (k+1) over nonempty bins with
/// k >= k_min; the slope estimates n-1. Throws when fewer than 3 bins
/// qualify. Also stores the fit into the histogram.
std::pair<double, double> fit_exponent(CountingHistogram& hist, int k_min);

/// Smallest k whose bin holds at least min_count points (default fit start).
int choose_k_min(const CountingHistogram& hist, std::uint64_t min_count = 30);

/// N(k; O1) / N(k; O2); throws when the denominator bin is empty.
double equidist_ratio(const std::vector<IsotropicVector>& points, int k, const ConeRegion& o1,
                      const ConeRegion& o2, double base);

/// CSV streaming: one vector per row, exact integers, comma separated.
void write_points_csv(std::ostream& out, const std::vector<IsotropicVector>& points);
std::vector<IsotropicVector> read_points_csv(std::istream& in);

}  // namespace cd

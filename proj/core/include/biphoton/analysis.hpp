#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "biphoton/errors.hpp"
#include "biphoton/scan.hpp"

namespace biphoton {

struct EnvelopeFit {
  double fwhm = 0.0;        // fs
  double center = 0.0;      // fs
  double visibility = 0.0;  // at center, from fitted max/min envelopes
  double residual_rms = 0.0;  // relative to the mean rate
  int n_extrema = 0;
  double sigma = 0.0;       // Gaussian s, fwhm = 2 sqrt(2 ln 2) s
  // max(T) = b_max + a_max g(T), min(T) = b_min + a_min g(T)
  double a_max = 0.0, b_max = 0.0, a_min = 0.0, b_min = 0.0;
  int iterations = 0;
};

// Fit failed; best() holds the last accepted iterate.
class FitError : public NumericError {
 public:
  FitError(const std::string& what, EnvelopeFit best)
      : NumericError(what, best.fwhm, best.residual_rms), best_(best) {}
  const EnvelopeFit& best() const noexcept { return best_; }

 private:
  EnvelopeFit best_;
};

struct FitOptions {
  std::optional<double> omega;  // rad/fs; otherwise meta, then periodogram
  int max_iterations = 200;
};

// Local fringe amplitude from a one-period least-squares fit of a + b cos + c sin.
struct FringeWindow {
  double center = 0.0;
  double mean = 0.0;
  double amplitude = 0.0;
  double max() const { return mean + amplitude; }
  double min() const { return mean - amplitude; }
};

std::vector<FringeWindow> fringe_windows(const ScanResult& scan, double omega);

EnvelopeFit fit_envelope(const ScanResult& scan, const FitOptions& opt = {});
double visibility_at(const ScanResult& scan, double T_center, std::optional<double> omega = std::nullopt);

// Peak of the zero-padded periodogram, refined by golden-section search.
double dominant_angular_frequency(const std::vector<double>& t, const std::vector<double>& y);

// Full width at half maximum of a sampled non-negative profile, by linear
// interpolation of the outermost half-maximum crossings.
double half_max_width(const std::vector<double>& x, const std::vector<double>& y);

nlohmann::json to_json(const EnvelopeFit& fit);

}  // namespace biphoton

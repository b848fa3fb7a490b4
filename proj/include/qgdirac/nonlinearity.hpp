#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace qgdirac {

/// Constants attached to a model: growth exponent p and bound C1 of
/// g(s) <= C1 (1 + s^{p-2}); superquadraticity exponent theta of
/// 0 < theta G(s) <= g(s) s^2; and (xi, R, c1) of Ghat(s) >= c1 s^xi for s >= R.
struct HypothesisConstants {
    double p = 4.0;
    double theta = 4.0;
    double xi = 1.9;
    double R = 1.0;
    double c1 = 0.25;
    double C1 = 1.0;
};

/// Scalar nonlinearity g of |psi|, with G(s) = int_0^s g(t) t dt and
/// Ghat(s) = g(s) s^2 / 2 - G(s). Implementations are immutable.
class NonlinearityModel {
public:
    explicit NonlinearityModel(HypothesisConstants constants) : constants_(constants) {}
    virtual ~NonlinearityModel() = default;

    virtual std::string name() const = 0;
    virtual double g(double s) const = 0;
    /// Defaults to a central difference with step 1e-6 max(s, 1).
    virtual double g_prime(double s) const;
    /// Defaults to composite Gauss-Legendre quadrature of g(t) t.
    virtual double primitive(double s) const;

    double g_hat(double s) const { return 0.5 * g(s) * s * s - primitive(s); }
    const HypothesisConstants& constants() const noexcept { return constants_; }

private:
    HypothesisConstants constants_;
};

using ModelPtr = std::shared_ptr<const NonlinearityModel>;

/// g(s) = s^{p-2}, G(s) = s^p / p. Constants: theta = p, R = 1,
/// c1 = 1/2 - 1/p, xi = 1.9, C1 = 1.
class PowerLaw final : public NonlinearityModel {
public:
    explicit PowerLaw(double p);

    double exponent() const noexcept { return p_; }
    std::string name() const override;
    double g(double s) const override;
    double g_prime(double s) const override;
    double primitive(double s) const override;

private:
    double p_;
};

/// Model defined by user callables; missing derivative/primitive use the
/// numerical fallbacks of the base class.
class FunctionModel final : public NonlinearityModel {
public:
    using Fn = std::function<double(double)>;

    FunctionModel(std::string name, Fn g, HypothesisConstants constants, Fn g_prime = {}, Fn primitive = {});

    std::string name() const override { return name_; }
    double g(double s) const override { return g_(s); }
    double g_prime(double s) const override;
    double primitive(double s) const override;

private:
    std::string name_;
    Fn g_, g_prime_, primitive_;
};

enum class Quantity { g, g_prime, G, G_hat };

/// Checked evaluation; throws std::invalid_argument for s < 0.
double eval(const NonlinearityModel& model, Quantity which, double s);

/// Logarithmically spaced samples in [lo, hi].
std::vector<double> log_grid(double lo = 1e-4, double hi = 1e4, int count = 241);

struct HypothesisResult {
    std::string hypothesis;  ///< g1..g5 or "constants"
    bool pass = true;
    std::optional<double> witness;  ///< first violating sample
    std::string detail;
};

struct HypothesisReport {
    std::vector<HypothesisResult> results;
    bool all_pass() const;
    const HypothesisResult& at(const std::string& hypothesis) const;
};

/// Sampled verification of the structural hypotheses on g. The grid should
/// cover [1e-4, 1e4] with at least 200 points.
HypothesisReport check_hypotheses(const NonlinearityModel& model, const std::vector<double>& grid);

struct GrowthBoundReport {
    bool pass = false;
    double constant = 0.0;  ///< largest C with G(s) >= C s^theta - C s^2 on the grid
    std::optional<double> witness;
    std::string detail;
};

/// Searches C in (0, 1e6] with G(s) >= C (s^theta - s^2) at every grid point.
GrowthBoundReport check_growth_bound(const NonlinearityModel& model, const std::vector<double>& grid);

}  // namespace qgdirac

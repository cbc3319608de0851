#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "zenit/domain.hpp"
#include "zenit/tariffs.hpp"
#include "zenit/timeseries.hpp"

namespace zenit {

enum class VarKind { continuous, binary };
enum class RowSense { le, eq, ge };

struct ModelVariable {
    std::string name;
    double lb = 0.0;
    double ub = std::numeric_limits<double>::infinity();
    VarKind kind = VarKind::continuous;
};

struct ModelRow {
    std::string name;
    std::vector<std::pair<int, double>> terms; // (variable index, coefficient)
    RowSense sense = RowSense::le;
    double rhs = 0.0;
};

/// Objective components tracked separately so reports can decompose the
/// solved objective without re-deriving coefficients.
enum class CostComponent { investment, maintenance, fuel, spot, retailer, tariff };
constexpr int kCostComponentCount = 6;
std::string to_string(CostComponent component);

struct ModelInstance {
    std::vector<ModelVariable> variables;
    std::vector<ModelRow> rows;
    std::vector<double> objective;    // dense, one coefficient per variable
    double reported_constant = 0.0;   // decision-independent cost, kept out of the objective
    int horizon = 0;

    std::unordered_map<std::string, int> variable_index;

    // Metered totals per hour and other roles the tariff/report layers need.
    std::vector<int> import_total_vars;
    std::vector<int> export_total_vars;
    int subscribed_capacity_var = -1;
    int co2_row = -1;
    std::map<std::string, int> capacity_vars; // tech instance id -> variable

    // Per-component objective coefficients (indices into `variables`).
    std::array<std::vector<std::pair<int, double>>, kCostComponentCount> component_terms;

    // Role -> variable-name pattern, for auditing which flow carries which role.
    std::map<std::string, std::string> role_registry;

    int var(const std::string& name) const;
    bool has_var(const std::string& name) const { return variable_index.count(name) > 0; }
};

/// Evaluates the objective (without the reported constant) at a point.
double evaluate_objective(const ModelInstance& model, const std::vector<double>& values);

/// Largest constraint/bound violation at a point (0 when feasible).
double max_constraint_violation(const ModelInstance& model, const std::vector<double>& values);

double row_activity(const ModelRow& row, const std::vector<double>& values);

/// Single-writer incremental builder; produces an immutable ModelInstance.
class ModelBuilder {
public:
    explicit ModelBuilder(int horizon, double inv_epsilon = 1.0)
        : horizon_(horizon), inv_epsilon_(inv_epsilon) {}

    int horizon() const { return horizon_; }
    double inv_epsilon() const { return inv_epsilon_; }

    int add_variable(const std::string& name, double lb = 0.0,
                     double ub = std::numeric_limits<double>::infinity(),
                     VarKind kind = VarKind::continuous);
    void add_row(const std::string& name, std::vector<std::pair<int, double>> terms,
                 RowSense sense, double rhs);
    void add_objective(CostComponent component, int var, double coeff);
    void add_reported_constant(double value) { instance_.reported_constant += value; }
    void register_role(const std::string& role, const std::string& pattern);

    void set_import_total_vars(std::vector<int> vars) { instance_.import_total_vars = std::move(vars); }
    void set_export_total_vars(std::vector<int> vars) { instance_.export_total_vars = std::move(vars); }
    void set_subscribed_capacity_var(int var) { instance_.subscribed_capacity_var = var; }
    void set_co2_row(int row) { instance_.co2_row = row; }
    void add_capacity_var(const std::string& instance_id, int var);

    const std::vector<int>& import_total_vars() const { return instance_.import_total_vars; }
    const std::vector<int>& export_total_vars() const { return instance_.export_total_vars; }

    int variable_count() const { return static_cast<int>(instance_.variables.size()); }
    int row_count() const { return static_cast<int>(instance_.rows.size()); }

    ModelInstance build();

private:
    int horizon_;
    double inv_epsilon_;
    ModelInstance instance_;
    bool built_ = false;
};

struct BuildOptions {
    std::optional<double> export_limit; // kWh/h cap on metered export, per hour
    bool co2_constraint = true;
    int horizon = kHoursPerYear; // shorter horizons for test instances
};

/// Constructs the full investment + operation model for one tariff scheme.
ModelInstance build_model(const ValidatedSpec& spec, const TimeSeriesSet& ts,
                          const TariffScheme& scheme, const BuildOptions& options);

/// Scarcity flags as build_model derives them (regional_load + scheme fraction).
ScarcityFlags model_scarcity_flags(const TimeSeriesSet& ts, const TariffScheme& scheme,
                                   int horizon);

} // namespace zenit

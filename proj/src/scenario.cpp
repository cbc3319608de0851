#include "zenit/scenario.hpp"

#include <atomic>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace zenit {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& pointer, const std::string& message) {
    throw ZenError("ConfigError", pointer + ": " + message);
}

const json& require(const json& node, const std::string& key, const std::string& pointer) {
    if (!node.is_object() || !node.contains(key)) config_error(pointer + "/" + key, "missing field");
    return node.at(key);
}

double number_at(const json& node, const std::string& key, const std::string& pointer) {
    const json& value = require(node, key, pointer);
    if (!value.is_number()) config_error(pointer + "/" + key, "expected a number");
    return value.get<double>();
}

double number_or(const json& node, const std::string& key, double fallback, const std::string& pointer) {
    if (!node.contains(key)) return fallback;
    if (!node.at(key).is_number()) config_error(pointer + "/" + key, "expected a number");
    return node.at(key).get<double>();
}

std::string string_at(const json& node, const std::string& key, const std::string& pointer) {
    const json& value = require(node, key, pointer);
    if (!value.is_string()) config_error(pointer + "/" + key, "expected a string");
    return value.get<std::string>();
}

TariffScheme parse_tariff(const json& node, const std::string& pointer) {
    const std::string type = string_at(node, "type", pointer);
    if (type == "energy") {
        EnergyTariff t;
        t.fixed_annual = number_or(node, "fixed_annual", t.fixed_annual, pointer);
        t.energy_price = number_or(node, "energy_price", t.energy_price, pointer);
        return t;
    }
    if (type == "tou") {
        TimeOfUseTariff t;
        t.low = number_or(node, "low", t.low, pointer);
        t.med = number_or(node, "med", t.med, pointer);
        t.peak = number_or(node, "peak", t.peak, pointer);
        auto hours = [&](const char* key, std::set<int>& into) {
            if (!node.contains(key)) return;
            if (!node.at(key).is_array()) config_error(pointer + "/" + key, "expected an array of hours");
            into.clear();
            for (const auto& h : node.at(key)) into.insert(h.get<int>());
        };
        hours("peak_hours", t.peak_hours);
        hours("low_hours", t.low_hours);
        return t;
    }
    if (type == "subscribed") {
        SubscribedCapacityTariff t;
        t.capacity_price = number_or(node, "capacity_price", t.capacity_price, pointer);
        t.below_price = number_or(node, "below_price", t.below_price, pointer);
        t.above_price = number_or(node, "above_price", t.above_price, pointer);
        return t;
    }
    if (type == "dynamic") {
        DynamicTariff t;
        t.base_price = number_or(node, "base_price", t.base_price, pointer);
        t.scarcity_price = number_or(node, "scarcity_price", t.scarcity_price, pointer);
        t.export_bonus = number_or(node, "export_bonus", t.export_bonus, pointer);
        t.scarcity_fraction = number_or(node, "scarcity_fraction", t.scarcity_fraction, pointer);
        return t;
    }
    config_error(pointer + "/type", "unknown tariff '" + type + "' (expected energy|tou|subscribed|dynamic)");
}

TariffScheme default_scheme(const std::string& tag) {
    if (tag == "energy") return EnergyTariff{};
    if (tag == "tou") return TimeOfUseTariff{};
    if (tag == "subscribed") return SubscribedCapacityTariff{};
    if (tag == "dynamic") return DynamicTariff{};
    throw ZenError("ConfigError", "unknown scheme tag '" + tag + "'");
}

} // namespace

Scenario load_scenario(const std::filesystem::path& config_path) {
    std::ifstream in(config_path);
    if (!in) throw ZenError("ConfigError", "cannot open " + config_path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ZenError("ConfigError", config_path.string() + ": " + e.what());
    }

    Scenario scenario;

    const json& nb = require(doc, "neighborhood", "");
    const json& types = require(nb, "building_types", "/neighborhood");
    if (!types.is_array() || types.empty())
        config_error("/neighborhood/building_types", "expected a non-empty array");
    for (std::size_t k = 0; k < types.size(); ++k) {
        const std::string ptr = "/neighborhood/building_types/" + std::to_string(k);
        const json& bt = types[k];
        BuildingType out;
        out.id = string_at(bt, "id", ptr);
        out.count = static_cast<int>(number_or(bt, "count", 1.0, ptr));
        out.electric_load_series = string_at(bt, "electric_load", ptr);
        out.heat_load_series = string_at(bt, "heat_load", ptr);
        out.roof_area = number_or(bt, "roof_area", 0.0, ptr);
        scenario.neighborhood.building_types.push_back(std::move(out));
    }
    scenario.neighborhood.heating_grid_loss = number_or(nb, "heating_grid_loss", 0.0, "/neighborhood");

    if (doc.contains("economics")) {
        const json& econ = doc.at("economics");
        EconomicParams& e = scenario.neighborhood.economic;
        e.discount_rate = number_or(econ, "discount_rate", e.discount_rate, "/economics");
        e.lifetime_years = static_cast<int>(number_or(econ, "lifetime_years", e.lifetime_years, "/economics"));
        e.grid_tariff_flat = number_or(econ, "grid_tariff_flat", e.grid_tariff_flat, "/economics");
        e.retailer_tariff = number_or(econ, "retailer_tariff", e.retailer_tariff, "/economics");
        e.heating_grid_cost = number_or(econ, "heating_grid_cost", e.heating_grid_cost, "/economics");
        if (econ.contains("heating_grid_enabled")) e.heating_grid_enabled = econ.at("heating_grid_enabled").get<bool>();
        e.el_co2_factor = number_or(econ, "el_co2_factor", e.el_co2_factor, "/economics");
    }

    if (doc.contains("technologies")) {
        const json& techs = doc.at("technologies");
        if (!techs.is_array()) config_error("/technologies", "expected an array");
        for (std::size_t k = 0; k < techs.size(); ++k) {
            const std::string ptr = "/technologies/" + std::to_string(k);
            const json& tj = techs[k];
            TechnologySpec tech;
            tech.id = string_at(tj, "id", ptr);
            try {
                tech.level = parse_tech_level(string_at(tj, "level", ptr));
                tech.carrier = parse_carrier(string_at(tj, "carrier", ptr));
            } catch (const ZenError& e) {
                config_error(ptr, e.what());
            }
            tech.discounted_investment_cost = number_at(tj, "investment_cost", ptr);
            tech.annual_maintenance_cost = number_or(tj, "maintenance_cost", 0.0, ptr);
            tech.efficiency = number_or(tj, "efficiency", 1.0, ptr);
            if (tj.contains("cop_profile")) tech.cop_profile = tj.at("cop_profile").get<std::string>();
            if (tj.contains("fuel")) tech.fuel = tj.at("fuel").get<std::string>();
            tech.max_capacity = number_or(tj, "max_capacity", tech.max_capacity, ptr);
            if (tj.contains("storage_power_ratio"))
                tech.storage_power_ratio = number_at(tj, "storage_power_ratio", ptr);
            scenario.neighborhood.technologies.push_back(std::move(tech));
        }
    }

    if (doc.contains("fuels")) {
        const json& fuels = doc.at("fuels");
        if (!fuels.is_array()) config_error("/fuels", "expected an array");
        for (std::size_t k = 0; k < fuels.size(); ++k) {
            const std::string ptr = "/fuels/" + std::to_string(k);
            FuelSpec fuel;
            fuel.id = string_at(fuels[k], "id", ptr);
            fuel.price = number_at(fuels[k], "price", ptr);
            fuel.co2_factor = number_at(fuels[k], "co2_factor", ptr);
            scenario.neighborhood.fuels.push_back(std::move(fuel));
        }
    }

    const json& series = require(doc, "series", "");
    std::filesystem::path csv = string_at(series, "csv", "/series");
    if (csv.is_relative()) csv = config_path.parent_path() / csv;
    scenario.series_csv = csv;
    const json& columns = require(series, "columns", "/series");
    if (!columns.is_object()) config_error("/series/columns", "expected an object");
    for (const auto& [id, col] : columns.items()) {
        const std::string ptr = "/series/columns/" + id;
        SeriesColumn out;
        out.column = col.contains("column") ? col.at("column").get<std::string>() : id;
        try {
            out.unit = parse_series_unit(string_at(col, "unit", ptr));
        } catch (const ZenError& e) {
            config_error(ptr + "/unit", e.what());
        }
        scenario.series_manifest[id] = std::move(out);
    }

    scenario.tariff = parse_tariff(require(doc, "tariff", ""), "/tariff");

    if (doc.contains("options")) {
        const json& options = doc.at("options");
        if (options.contains("export_limit") && !options.at("export_limit").is_null())
            scenario.options.export_limit = number_at(options, "export_limit", "/options");
        if (options.contains("co2_constraint"))
            scenario.options.co2_constraint = options.at("co2_constraint").get<bool>();
    }

    // Fingerprint over the scenario content minus the run axes (tariff, export
    // limit), so cells of one comparison grid match each other.
    json fp = doc;
    fp.erase("tariff");
    if (fp.contains("options")) fp["options"].erase("export_limit");
    scenario.fingerprint = std::to_string(std::hash<std::string>{}(fp.dump()));

    return scenario;
}

CellOutcome run_scenario(const Scenario& scenario, const BackendConfig& backend,
                         const std::filesystem::path& out_dir) {
    CellOutcome outcome;
    outcome.scheme = scheme_tag(scenario.tariff);
    outcome.export_limit = scenario.options.export_limit;
    outcome.out_dir = out_dir;

    const TimeSeriesSet ts = load_series_csv(scenario.series_csv, scenario.series_manifest);
    const ValidatedSpec spec = validate_neighborhood(scenario.neighborhood, ts);
    const ModelInstance model = build_model(spec, ts, scenario.tariff, scenario.options);
    const ScarcityFlags flags = model_scarcity_flags(ts, scenario.tariff, model.horizon);

    const SolveResult result = solve(model, backend);
    outcome.status = result.status;
    if (result.status != SolveStatus::optimal) {
        if (result.status == SolveStatus::infeasible && model.co2_row >= 0)
            outcome.diagnostic = "infeasible; likely binding row: " + model.rows[model.co2_row].name +
                                 " (annual CO2 balance)";
        else
            outcome.diagnostic = to_string(result.status);
        return outcome;
    }

    outcome.report = make_report(model, result, spec, scenario.tariff, flags,
                                 scenario.options.export_limit, scenario.fingerprint);
    write_report_csvs(*outcome.report, out_dir);
    return outcome;
}

namespace {

std::string cell_dir_name(const std::string& scheme, const std::optional<double>& limit) {
    if (!limit) return scheme + "_nolimit";
    std::ostringstream os;
    os << scheme << "_limit" << *limit;
    return os.str();
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace

CompareOutcome compare_tariffs(const Scenario& scenario, const BackendConfig& backend,
                               const std::filesystem::path& out_dir, const CompareOptions& options) {
    std::vector<std::string> schemes = options.schemes;
    if (schemes.empty()) schemes = {"energy", "tou", "subscribed", "dynamic"};
    std::vector<std::optional<double>> limits = options.export_limits;
    if (limits.empty()) limits = {std::nullopt, 100.0};

    struct Cell {
        Scenario scenario;
        std::filesystem::path dir;
    };
    std::vector<Cell> cells;
    for (const auto& limit : limits) {
        for (const auto& scheme : schemes) {
            Cell cell{scenario, out_dir / cell_dir_name(scheme, limit)};
            // Keep file-level coefficient overrides when the tag matches.
            if (scheme != scheme_tag(scenario.tariff)) cell.scenario.tariff = default_scheme(scheme);
            cell.scenario.options.export_limit = limit;
            cells.push_back(std::move(cell));
        }
    }

    CompareOutcome outcome;
    outcome.cells.resize(cells.size());
    std::atomic<std::size_t> next{0};
    std::mutex failures_mutex;

    auto worker = [&]() {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= cells.size()) return;
            BackendConfig cell_backend = backend;
            cell_backend.work_dir = cells[k].dir / "solver";
            try {
                outcome.cells[k] = run_scenario(cells[k].scenario, cell_backend, cells[k].dir);
            } catch (const std::exception& e) {
                CellOutcome failed;
                failed.scheme = scheme_tag(cells[k].scenario.tariff);
                failed.export_limit = cells[k].scenario.options.export_limit;
                failed.diagnostic = e.what();
                failed.out_dir = cells[k].dir;
                outcome.cells[k] = std::move(failed);
            }
            if (outcome.cells[k].status != SolveStatus::optimal) {
                std::lock_guard<std::mutex> lock(failures_mutex);
                outcome.failed_cells.push_back(cells[k].dir.filename().string() + ": " +
                                               outcome.cells[k].diagnostic);
            }
        }
    };

    const int jobs = std::max(1, options.jobs);
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& thread : pool) thread.join();

    std::filesystem::create_directories(out_dir);

    // Combined tables, one investment-delta table per export case.
    for (const auto& limit : limits) {
        const SolutionReport* baseline = nullptr;
        std::vector<SolutionReport> variants;
        std::vector<const CellOutcome*> row_cells;
        for (const auto& cell : outcome.cells) {
            if (cell.export_limit != limit) continue;
            row_cells.push_back(&cell);
            if (cell.report && cell.scheme == "energy") baseline = &*cell.report;
            if (cell.report && cell.scheme != "energy") variants.push_back(*cell.report);
        }
        std::string suffix = limit ? "limit" : "nolimit";
        std::ofstream out(out_dir / ("investment_delta_" + suffix + ".csv"), std::ios::binary);
        if (!baseline) {
            out << "unavailable: energy baseline cell did not solve\n";
            continue;
        }
        const auto table = investment_delta_table(variants, *baseline);
        out << "technology," << table.baseline_scheme;
        for (const auto& scheme : table.variant_schemes) out << "," << scheme << "," << scheme << "_delta";
        out << "\n";
        for (const auto& row : table.rows) {
            out << row.tech << "," << num(row.baseline);
            for (double v : row.variants) out << "," << num(v) << "," << num(v - row.baseline);
            out << "\n";
        }
    }

    {
        std::ofstream out(out_dir / "max_imports.csv", std::ios::binary);
        out << "export_case";
        for (const auto& scheme : schemes) out << "," << scheme;
        out << "\n";
        for (const auto& limit : limits) {
            out << (limit ? "limit_" + num(*limit) : "no_limit");
            for (const auto& scheme : schemes) {
                const CellOutcome* found = nullptr;
                for (const auto& cell : outcome.cells)
                    if (cell.scheme == scheme && cell.export_limit == limit) found = &cell;
                out << "," << (found && found->report ? num(found->report->peak_import) : "infeasible");
            }
            out << "\n";
        }
    }

    {
        std::ofstream out(out_dir / "cost_revenue.csv", std::ios::binary);
        out << "cell,scheme,export_limit,total_cost,dso_revenue\n";
        for (const auto& cell : outcome.cells) {
            out << cell.out_dir.filename().string() << "," << cell.scheme << ","
                << (cell.export_limit ? num(*cell.export_limit) : "none") << ",";
            if (cell.report)
                out << num(cell.report->objective_value + cell.report->reported_constant) << ","
                    << num(cell.report->dso_revenue_lifetime) << "\n";
            else
                out << "infeasible,infeasible\n";
        }
    }

    return outcome;
}

} // namespace zenit

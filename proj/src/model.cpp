#include "zenit/model.hpp"

#include <algorithm>
#include <cmath>

namespace zenit {

std::string to_string(CostComponent component) {
    switch (component) {
    case CostComponent::investment: return "investment";
    case CostComponent::maintenance: return "maintenance";
    case CostComponent::fuel: return "fuel";
    case CostComponent::spot: return "spot";
    case CostComponent::retailer: return "retailer";
    case CostComponent::tariff: return "tariff";
    }
    return "?";
}

int ModelInstance::var(const std::string& name) const {
    auto it = variable_index.find(name);
    if (it == variable_index.end()) throw ZenError("MissingVariable", name);
    return it->second;
}

double row_activity(const ModelRow& row, const std::vector<double>& values) {
    double activity = 0.0;
    for (const auto& [idx, coeff] : row.terms) activity += coeff * values[idx];
    return activity;
}

double evaluate_objective(const ModelInstance& model, const std::vector<double>& values) {
    double total = 0.0;
    for (std::size_t i = 0; i < model.objective.size(); ++i) total += model.objective[i] * values[i];
    return total;
}

double max_constraint_violation(const ModelInstance& model, const std::vector<double>& values) {
    double worst = 0.0;
    for (std::size_t i = 0; i < model.variables.size(); ++i) {
        const auto& v = model.variables[i];
        worst = std::max(worst, v.lb - values[i]);
        worst = std::max(worst, values[i] - v.ub);
    }
    for (const auto& row : model.rows) {
        const double activity = row_activity(row, values);
        switch (row.sense) {
        case RowSense::le: worst = std::max(worst, activity - row.rhs); break;
        case RowSense::ge: worst = std::max(worst, row.rhs - activity); break;
        case RowSense::eq: worst = std::max(worst, std::abs(activity - row.rhs)); break;
        }
    }
    return worst;
}

int ModelBuilder::add_variable(const std::string& name, double lb, double ub, VarKind kind) {
    if (instance_.variable_index.count(name))
        throw ZenError("DuplicateName", "variable '" + name + "'");
    const int idx = static_cast<int>(instance_.variables.size());
    instance_.variables.push_back({name, lb, ub, kind});
    instance_.objective.push_back(0.0);
    instance_.variable_index.emplace(name, idx);
    return idx;
}

void ModelBuilder::add_row(const std::string& name, std::vector<std::pair<int, double>> terms,
                           RowSense sense, double rhs) {
    for (const auto& [idx, coeff] : terms)
        if (idx < 0 || idx >= variable_count())
            throw ZenError("MissingVariable", "row '" + name + "' references variable #" + std::to_string(idx));
    instance_.rows.push_back({name, std::move(terms), sense, rhs});
}

void ModelBuilder::add_objective(CostComponent component, int var, double coeff) {
    if (var < 0 || var >= variable_count())
        throw ZenError("MissingVariable", "objective references variable #" + std::to_string(var));
    instance_.objective[var] += coeff;
    instance_.component_terms[static_cast<int>(component)].push_back({var, coeff});
}

void ModelBuilder::register_role(const std::string& role, const std::string& pattern) {
    instance_.role_registry[role] = pattern;
}

void ModelBuilder::add_capacity_var(const std::string& instance_id, int var) {
    instance_.capacity_vars[instance_id] = var;
}

ModelInstance ModelBuilder::build() {
    if (built_) throw ZenError("BuilderReuse", "ModelBuilder::build called twice");
    built_ = true;
    instance_.horizon = horizon_;
    return std::move(instance_);
}

namespace {

struct TechInstance {
    std::string id; // tech id, or tech@building_type for building-level techs
    const TechnologySpec* tech = nullptr;
    int btype = -1; // index into building_types, -1 = neighborhood level
    int capacity_var = -1;
};

struct Layout {
    std::vector<TechInstance> elec_profile;  // insolation-driven producers (PV)
    std::vector<TechInstance> elec_dispatch; // fuel-burning electricity producers
    std::vector<TechInstance> heat;          // heat producers, any level
    std::vector<TechInstance> batteries;
    std::vector<TechInstance> heat_storages; // key: btype (-1 = plant storage)
    std::vector<std::string> fuels_in_use;   // sorted fuel ids
    bool has_heat_system = false;
};

Layout plan_layout(const NeighborhoodSpec& spec, const TimeSeriesSet& ts, int horizon) {
    Layout layout;

    auto instantiate = [&](const TechnologySpec& tech) {
        std::vector<TechInstance> out;
        if (tech.level == TechLevel::building) {
            for (int b = 0; b < static_cast<int>(spec.building_types.size()); ++b)
                out.push_back({tech.id + "@" + spec.building_types[b].id, &tech, b, -1});
        } else {
            out.push_back({tech.id, &tech, -1, -1});
        }
        return out;
    };

    for (const auto& tech : spec.technologies) {
        for (auto& inst : instantiate(tech)) {
            switch (tech.carrier) {
            case Carrier::electricity:
                (tech.fuel ? layout.elec_dispatch : layout.elec_profile).push_back(inst);
                break;
            case Carrier::heat: layout.heat.push_back(inst); break;
            case Carrier::electricity_storage: layout.batteries.push_back(inst); break;
            case Carrier::heat_storage: layout.heat_storages.push_back(inst); break;
            }
        }
        if (tech.fuel) layout.fuels_in_use.push_back(*tech.fuel);
    }

    auto by_id = [](const TechInstance& a, const TechInstance& b) { return a.id < b.id; };
    std::sort(layout.elec_profile.begin(), layout.elec_profile.end(), by_id);
    std::sort(layout.elec_dispatch.begin(), layout.elec_dispatch.end(), by_id);
    std::sort(layout.heat.begin(), layout.heat.end(), by_id);
    std::sort(layout.batteries.begin(), layout.batteries.end(), by_id);
    std::sort(layout.heat_storages.begin(), layout.heat_storages.end(), by_id);
    std::sort(layout.fuels_in_use.begin(), layout.fuels_in_use.end());
    layout.fuels_in_use.erase(std::unique(layout.fuels_in_use.begin(), layout.fuels_in_use.end()),
                              layout.fuels_in_use.end());

    bool any_heat_load = false;
    for (const auto& bt : spec.building_types) {
        const auto& load = ts.values(bt.heat_load_series);
        for (int t = 0; t < horizon; ++t) any_heat_load |= load[t] > 0.0;
    }
    layout.has_heat_system = any_heat_load || !layout.heat.empty() || !layout.heat_storages.empty();

    return layout;
}

std::string tvar(const std::string& sym, const std::string& inst, int t) {
    return sym + "(" + inst + "," + std::to_string(t) + ")";
}

std::string tvar(const std::string& sym, int t) { return sym + "(" + std::to_string(t) + ")"; }

} // namespace

ScarcityFlags model_scarcity_flags(const TimeSeriesSet& ts, const TariffScheme& scheme, int horizon) {
    if (const auto* dyn = std::get_if<DynamicTariff>(&scheme)) {
        const auto& regional = ts.values("regional_load");
        std::vector<double> window(regional.begin(), regional.begin() + horizon);
        return scarcity_flags(window, dyn->scarcity_fraction);
    }
    ScarcityFlags none;
    none.flags.assign(static_cast<std::size_t>(horizon), false);
    return none;
}

ModelInstance build_model(const ValidatedSpec& vspec, const TimeSeriesSet& ts,
                          const TariffScheme& scheme, const BuildOptions& options) {
    const NeighborhoodSpec& spec = *vspec;
    validate_tariff(scheme);

    const int T = options.horizon;
    if (T < 1 || static_cast<std::size_t>(T) > ts.horizon())
        throw ZenError("HorizonMismatch", "model horizon " + std::to_string(T) + " vs series horizon " +
                                              std::to_string(ts.horizon()));
    if (options.export_limit && *options.export_limit <= 0.0)
        throw ZenError("BadUnit", "export limit must be positive");

    const auto& econ = spec.economic;
    const double epsilon = discount_factor(econ.discount_rate, econ.lifetime_years);
    const double inv_eps = epsilon > 0.0 ? 1.0 / epsilon : 0.0;

    Layout layout = plan_layout(spec, ts, T);
    const auto& insolation = ts.values("insolation");
    const auto& spot = ts.values("spot_price");

    ModelBuilder b(T, inv_eps);

    // --- capacity variables, one per technology instance -------------------
    std::vector<TechInstance*> all_instances;
    for (auto* group : {&layout.elec_profile, &layout.elec_dispatch, &layout.heat,
                        &layout.batteries, &layout.heat_storages})
        for (auto& inst : *group) all_instances.push_back(&inst);
    std::sort(all_instances.begin(), all_instances.end(),
              [](const TechInstance* a, const TechInstance* c) { return a->id < c->id; });
    for (auto* inst : all_instances) {
        inst->capacity_var = b.add_variable("x(" + inst->id + ")", 0.0, inst->tech->max_capacity);
        b.add_capacity_var(inst->id, inst->capacity_var);
        b.add_objective(CostComponent::investment, inst->capacity_var,
                        inst->tech->discounted_investment_cost);
        b.add_objective(CostComponent::maintenance, inst->capacity_var,
                        inst->tech->annual_maintenance_cost * inv_eps);
    }
    b.register_role("capacity", "x(tech)");

    // --- time-indexed variables, symbol-major for reproducible ordering ----
    std::vector<int> imp(T);
    for (int t = 0; t < T; ++t) imp[t] = b.add_variable(tvar("imp", t));
    b.register_role("grid_import_to_load", "imp(t)");

    auto block = [&](const char* sym, const std::vector<TechInstance>& group) {
        std::vector<std::vector<int>> vars(group.size(), std::vector<int>(T));
        for (std::size_t g = 0; g < group.size(); ++g)
            for (int t = 0; t < T; ++t) vars[g][t] = b.add_variable(tvar(sym, group[g].id, t));
        return vars;
    };

    auto gen = block("gen", layout.elec_dispatch);

    std::vector<TechInstance> elec_producers;
    elec_producers.insert(elec_producers.end(), layout.elec_profile.begin(), layout.elec_profile.end());
    elec_producers.insert(elec_producers.end(), layout.elec_dispatch.begin(), layout.elec_dispatch.end());
    std::sort(elec_producers.begin(), elec_producers.end(),
              [](const TechInstance& a, const TechInstance& c) { return a.id < c.id; });
    auto genexp = block("exp", elec_producers);
    auto dump = block("dmp", layout.elec_profile);
    b.register_role("generation_export", "exp(tech,t)");
    b.register_role("generation_dump", "dmp(tech,t)");

    auto heat_out = block("q", layout.heat);
    b.register_role("heat_output", "q(tech,t)");

    std::vector<std::vector<int>> fuel_use(layout.fuels_in_use.size(), std::vector<int>(T));
    for (std::size_t f = 0; f < layout.fuels_in_use.size(); ++f)
        for (int t = 0; t < T; ++t)
            fuel_use[f][t] = b.add_variable(tvar("f", layout.fuels_in_use[f], t));
    b.register_role("fuel_use", "f(fuel,t)");

    auto bat_chg_grid = block("bcg", layout.batteries);
    auto bat_chg_onsite = block("bco", layout.batteries);
    auto bat_dis_load = block("bdl", layout.batteries);
    auto bat_dis_export = block("bde", layout.batteries);
    auto bat_soc = block("soc", layout.batteries);
    b.register_role("battery_charge_from_grid", "bcg(tech,t)");
    b.register_role("battery_charge_from_onsite", "bco(tech,t)");
    b.register_role("battery_discharge_to_load", "bdl(tech,t)");
    b.register_role("battery_discharge_to_export", "bde(tech,t)");
    b.register_role("battery_state_of_charge", "soc(tech,t)");

    auto hs_chg = block("hcg", layout.heat_storages);
    auto hs_dis = block("hds", layout.heat_storages);
    auto hs_soc = block("hsc", layout.heat_storages);

    const int B = static_cast<int>(spec.building_types.size());
    std::vector<std::vector<int>> deliver; // heating-grid delivery per building type
    if (layout.has_heat_system) {
        deliver.assign(B, std::vector<int>(T));
        const double delivery_ub =
            econ.heating_grid_enabled ? std::numeric_limits<double>::infinity() : 0.0;
        for (int bt = 0; bt < B; ++bt)
            for (int t = 0; t < T; ++t)
                deliver[bt][t] = b.add_variable(tvar("dlv", spec.building_types[bt].id, t), 0.0, delivery_ub);
        b.register_role("heating_grid_delivery", "dlv(building_type,t)");
    }

    std::vector<int> imp_total(T), exp_total(T);
    for (int t = 0; t < T; ++t) imp_total[t] = b.add_variable(tvar("impt", t));
    for (int t = 0; t < T; ++t) exp_total[t] = b.add_variable(tvar("expt", t));
    b.set_import_total_vars(imp_total);
    b.set_export_total_vars(exp_total);
    b.register_role("metered_import_total", "impt(t)");
    b.register_role("metered_export_total", "expt(t)");

    // --- metering definitions ----------------------------------------------
    for (int t = 0; t < T; ++t) {
        std::vector<std::pair<int, double>> terms{{imp[t], 1.0}};
        for (std::size_t s = 0; s < layout.batteries.size(); ++s) terms.push_back({bat_chg_grid[s][t], 1.0});
        terms.push_back({imp_total[t], -1.0});
        b.add_row(tvar("defimp", t), std::move(terms), RowSense::eq, 0.0);
    }
    for (int t = 0; t < T; ++t) {
        std::vector<std::pair<int, double>> terms;
        for (std::size_t g = 0; g < elec_producers.size(); ++g) terms.push_back({genexp[g][t], 1.0});
        for (std::size_t s = 0; s < layout.batteries.size(); ++s) terms.push_back({bat_dis_export[s][t], 1.0});
        terms.push_back({exp_total[t], -1.0});
        b.add_row(tvar("defexp", t), std::move(terms), RowSense::eq, 0.0);
    }

    // --- electricity balance -------------------------------------------------
    auto profile_factor = [&](const TechInstance& inst, int t) {
        return insolation[t] * inst.tech->efficiency;
    };
    auto elec_draw_coeff = [&](const TechInstance& inst, int t) -> double {
        // electricity needed per unit heat output; 0 for fuel-burning producers
        if (inst.tech->fuel) return 0.0;
        if (inst.tech->cop_profile) return 1.0 / ts.values(*inst.tech->cop_profile)[t];
        return 1.0 / inst.tech->efficiency;
    };

    for (int t = 0; t < T; ++t) {
        double load = 0.0;
        for (const auto& bt : spec.building_types)
            load += bt.count * ts.values(bt.electric_load_series)[t];

        std::vector<std::pair<int, double>> terms{{imp[t], 1.0}};
        for (std::size_t g = 0; g < layout.elec_profile.size(); ++g) {
            const double factor = profile_factor(layout.elec_profile[g], t);
            if (factor != 0.0) terms.push_back({layout.elec_profile[g].capacity_var, factor});
            terms.push_back({dump[g][t], -1.0});
        }
        for (std::size_t g = 0; g < layout.elec_dispatch.size(); ++g) terms.push_back({gen[g][t], 1.0});
        for (std::size_t g = 0; g < elec_producers.size(); ++g) terms.push_back({genexp[g][t], -1.0});
        for (std::size_t s = 0; s < layout.batteries.size(); ++s) {
            terms.push_back({bat_dis_load[s][t], 1.0});
            terms.push_back({bat_chg_onsite[s][t], -1.0});
        }
        for (std::size_t h = 0; h < layout.heat.size(); ++h) {
            const double draw = elec_draw_coeff(layout.heat[h], t);
            if (draw != 0.0) terms.push_back({heat_out[h][t], -draw});
        }
        b.add_row(tvar("eb", t), std::move(terms), RowSense::eq, load);
    }

    // --- generation capacity and export split -------------------------------
    {
        std::size_t gi = 0;
        for (std::size_t g = 0; g < elec_producers.size(); ++g) {
            const auto& inst = elec_producers[g];
            const bool profile = !inst.tech->fuel;
            if (profile) {
                // locate matching dump column
                std::size_t p = 0;
                while (layout.elec_profile[p].id != inst.id) ++p;
                for (int t = 0; t < T; ++t)
                    b.add_row(tvar("gcap", inst.id, t),
                              {{genexp[g][t], 1.0}, {dump[p][t], 1.0},
                               {inst.capacity_var, -profile_factor(inst, t)}},
                              RowSense::le, 0.0);
            } else {
                std::size_t d = 0;
                while (layout.elec_dispatch[d].id != inst.id) ++d;
                for (int t = 0; t < T; ++t) {
                    b.add_row(tvar("gcap", inst.id, t), {{genexp[g][t], 1.0}, {gen[d][t], -1.0}},
                              RowSense::le, 0.0);
                    b.add_row(tvar("glim", inst.id, t), {{gen[d][t], 1.0}, {inst.capacity_var, -1.0}},
                              RowSense::le, 0.0);
                }
            }
            (void)gi;
        }
    }

    // --- heat balances -------------------------------------------------------
    if (layout.has_heat_system) {
        const double grid_yield = 1.0 - spec.heating_grid_loss;
        for (int bt = 0; bt < B; ++bt) {
            const auto& btype = spec.building_types[bt];
            const auto& heat_load = ts.values(btype.heat_load_series);
            for (int t = 0; t < T; ++t) {
                std::vector<std::pair<int, double>> terms;
                for (std::size_t h = 0; h < layout.heat.size(); ++h)
                    if (layout.heat[h].btype == bt) terms.push_back({heat_out[h][t], 1.0});
                for (std::size_t s = 0; s < layout.heat_storages.size(); ++s)
                    if (layout.heat_storages[s].btype == bt) {
                        terms.push_back({hs_dis[s][t], 1.0});
                        terms.push_back({hs_chg[s][t], -1.0});
                    }
                terms.push_back({deliver[bt][t], grid_yield});
                b.add_row(tvar("hb", btype.id, t), std::move(terms), RowSense::eq,
                          btype.count * heat_load[t]);
            }
        }
        for (int t = 0; t < T; ++t) {
            std::vector<std::pair<int, double>> terms;
            for (std::size_t h = 0; h < layout.heat.size(); ++h)
                if (layout.heat[h].btype == -1) terms.push_back({heat_out[h][t], 1.0});
            for (std::size_t s = 0; s < layout.heat_storages.size(); ++s)
                if (layout.heat_storages[s].btype == -1) {
                    terms.push_back({hs_dis[s][t], 1.0});
                    terms.push_back({hs_chg[s][t], -1.0});
                }
            for (int bt = 0; bt < B; ++bt) terms.push_back({deliver[bt][t], -1.0});
            b.add_row(tvar("pb", t), std::move(terms), RowSense::eq, 0.0);
        }
    }

    // --- heat producer capacity ----------------------------------------------
    for (std::size_t h = 0; h < layout.heat.size(); ++h)
        for (int t = 0; t < T; ++t)
            b.add_row(tvar("qcap", layout.heat[h].id, t),
                      {{heat_out[h][t], 1.0}, {layout.heat[h].capacity_var, -1.0}}, RowSense::le, 0.0);

    // --- storage dynamics: cyclic year, charge-side efficiency ---------------
    auto add_storage = [&](const TechInstance& inst, const std::vector<int>& charge,
                           const std::vector<int>* charge2, const std::vector<int>& discharge,
                           const std::vector<int>* discharge2, const std::vector<int>& soc) {
        const double eta = inst.tech->efficiency;
        for (int t = 0; t < T; ++t) {
            const int next = (t + 1) % T;
            std::vector<std::pair<int, double>> terms{{soc[next], 1.0}, {soc[t], -1.0},
                                                      {charge[t], -eta}, {discharge[t], 1.0}};
            if (charge2) terms.push_back({(*charge2)[t], -eta});
            if (discharge2) terms.push_back({(*discharge2)[t], 1.0});
            b.add_row(tvar("sd", inst.id, t), std::move(terms), RowSense::eq, 0.0);
            b.add_row(tvar("scap", inst.id, t), {{soc[t], 1.0}, {inst.capacity_var, -1.0}},
                      RowSense::le, 0.0);
            if (inst.tech->storage_power_ratio) {
                const double ratio = *inst.tech->storage_power_ratio;
                std::vector<std::pair<int, double>> chg{{charge[t], 1.0}, {inst.capacity_var, -ratio}};
                if (charge2) chg.push_back({(*charge2)[t], 1.0});
                b.add_row(tvar("pchg", inst.id, t), std::move(chg), RowSense::le, 0.0);
                std::vector<std::pair<int, double>> dis{{discharge[t], 1.0}, {inst.capacity_var, -ratio}};
                if (discharge2) dis.push_back({(*discharge2)[t], 1.0});
                b.add_row(tvar("pdis", inst.id, t), std::move(dis), RowSense::le, 0.0);
            }
        }
    };
    for (std::size_t s = 0; s < layout.batteries.size(); ++s)
        add_storage(layout.batteries[s], bat_chg_grid[s], &bat_chg_onsite[s], bat_dis_load[s],
                    &bat_dis_export[s], bat_soc[s]);
    for (std::size_t s = 0; s < layout.heat_storages.size(); ++s)
        add_storage(layout.heat_storages[s], hs_chg[s], nullptr, hs_dis[s], nullptr, hs_soc[s]);

    // --- fuel accounting ------------------------------------------------------
    for (std::size_t f = 0; f < layout.fuels_in_use.size(); ++f) {
        const std::string& fid = layout.fuels_in_use[f];
        for (int t = 0; t < T; ++t) {
            std::vector<std::pair<int, double>> terms;
            for (std::size_t h = 0; h < layout.heat.size(); ++h)
                if (layout.heat[h].tech->fuel == fid)
                    terms.push_back({heat_out[h][t], 1.0 / layout.heat[h].tech->efficiency});
            for (std::size_t g = 0; g < layout.elec_dispatch.size(); ++g)
                if (layout.elec_dispatch[g].tech->fuel == fid)
                    terms.push_back({gen[g][t], 1.0 / layout.elec_dispatch[g].tech->efficiency});
            terms.push_back({fuel_use[f][t], -1.0});
            b.add_row(tvar("fd", fid, t), std::move(terms), RowSense::eq, 0.0);
        }
    }

    // --- annual CO2 balance ----------------------------------------------------
    if (options.co2_constraint) {
        const double phi_e = econ.el_co2_factor;
        std::vector<std::pair<int, double>> terms;
        for (int t = 0; t < T; ++t) terms.push_back({imp_total[t], phi_e});
        for (std::size_t f = 0; f < layout.fuels_in_use.size(); ++f) {
            double phi_f = 0.0;
            for (const auto& fuel : spec.fuels)
                if (fuel.id == layout.fuels_in_use[f]) phi_f = fuel.co2_factor;
            for (int t = 0; t < T; ++t) terms.push_back({fuel_use[f][t], phi_f});
        }
        for (std::size_t g = 0; g < elec_producers.size(); ++g)
            for (int t = 0; t < T; ++t) terms.push_back({genexp[g][t], -phi_e});
        for (std::size_t s = 0; s < layout.batteries.size(); ++s) {
            const double eta = layout.batteries[s].tech->efficiency;
            for (int t = 0; t < T; ++t) terms.push_back({bat_dis_export[s][t], -phi_e * eta});
        }
        b.add_row("co2", std::move(terms), RowSense::le, 0.0);
        b.set_co2_row(b.row_count() - 1);
        b.register_role("co2_balance", "co2");
    }

    // --- export cap at the interconnection -------------------------------------
    if (options.export_limit)
        for (int t = 0; t < T; ++t)
            b.add_row(tvar("xcap", t), {{exp_total[t], 1.0}}, RowSense::le, *options.export_limit);

    // --- objective ---------------------------------------------------------------
    for (std::size_t f = 0; f < layout.fuels_in_use.size(); ++f) {
        double price = 0.0;
        for (const auto& fuel : spec.fuels)
            if (fuel.id == layout.fuels_in_use[f]) price = fuel.price;
        for (int t = 0; t < T; ++t)
            b.add_objective(CostComponent::fuel, fuel_use[f][t], inv_eps * price);
    }
    for (int t = 0; t < T; ++t) {
        b.add_objective(CostComponent::spot, imp_total[t], inv_eps * spot[t]);
        b.add_objective(CostComponent::spot, exp_total[t], -inv_eps * spot[t]);
        if (econ.retailer_tariff != 0.0)
            b.add_objective(CostComponent::retailer, imp_total[t], inv_eps * econ.retailer_tariff);
    }
    if (econ.heating_grid_enabled) b.add_reported_constant(econ.heating_grid_cost);

    tariff_linear_terms(scheme, b, model_scarcity_flags(ts, scheme, T));

    return b.build();
}

} // namespace zenit

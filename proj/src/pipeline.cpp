#include "cubfuzz/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace cubfuzz {

namespace {

namespace fsys = std::filesystem;
using nlohmann::json;

std::string out_path(const std::string& dir, const std::string& name) {
  const std::string d = dir.empty() ? "." : dir;
  fsys::create_directories(d);
  return (fsys::path(d) / name).string();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file " + path);
  return out;
}

std::string fmtg(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return std::string(buf);
}

json scale_json(const RatingScale& s) {
  return json{{"m", s.m},
              {"ip", s.ip},
              {"lb", s.lb},
              {"ub", s.ub},
              {"orientation", s.orientation == Orientation::positive ? "positive" : "negative"}};
}

json config_json(const AnalysisConfig& cfg) {
  json systems = json::array();
  for (FuzzySystem s : cfg.systems) systems.push_back(to_string(s));
  json shelter;
  if (cfg.shelter == ShelterMode::fixed) shelter = cfg.shelter_c;
  else shelter = to_string(cfg.shelter);
  json weights;
  if (cfg.weights == WeightScheme::custom) weights = json{{"custom", cfg.weights_path}};
  else weights = to_string(cfg.weights);
  return json{{"systems", systems},
              {"spline", {{"epsilon", cfg.spline.epsilon},
                          {"theta", cfg.spline.theta},
                          {"eta", cfg.spline.eta},
                          {"a", cfg.spline.a},
                          {"b", cfg.spline.b}}},
              {"shelter", shelter},
              {"alpha", cfg.alpha},
              {"weights", weights},
              {"seed", cfg.seed},
              {"em", {{"max_iter", cfg.em.max_iter}, {"tol", cfg.em.tol}}}};
}

void write_run_json(const std::string& dir, json& run, RunOutcome& rc) {
  run["ok"] = rc.ok;
  const std::string path = out_path(dir, "run.json");
  json files = json::array();
  for (const std::string& f : rc.files) files.push_back(f);
  files.push_back(path);
  run["files"] = files;
  std::ofstream out = open_out(path);
  out << run.dump(2) << '\n';
  rc.files.push_back(path);
}

json item_fit_json(const ItemFit& f) {
  json j{{"item", f.item}, {"n", f.n}};
  if (!f.error.empty()) {
    j["error"] = f.error;
    return j;
  }
  json base{{"pi", f.base.base().pi},
            {"xi", f.base.base().xi},
            {"loglik", f.base.loglik},
            {"bic", f.base.bic},
            {"iterations", f.base.n_iter},
            {"converged", f.base.converged},
            {"boundary", f.base.boundary}};
  if (!f.base.std_errors.empty()) base["se"] = f.base.std_errors;
  j["baseline"] = base;
  if (f.shelter_tried) {
    if (!f.shelter_error.empty()) {
      j["shelter"] = json{{"error", f.shelter_error}};
    } else {
      const CubShelterParams& p = f.shelter_fit.shelter();
      json sh{{"c", p.c},
              {"pi_star", p.pi_star},
              {"xi", p.xi},
              {"delta", p.delta},
              {"pi1", p.pi1()},
              {"pi2", p.pi2()},
              {"loglik", f.shelter_fit.loglik},
              {"bic", f.shelter_fit.bic},
              {"iterations", f.shelter_fit.n_iter},
              {"converged", f.shelter_fit.converged},
              {"boundary", f.shelter_fit.boundary},
              {"lrt", {{"statistic", f.lrt.statistic}, {"p_value", f.lrt.p_value}}},
              {"retained", f.shelter_retained}};
      if (!f.shelter_fit.std_errors.empty()) sh["se"] = f.shelter_fit.std_errors;
      if (f.has_derived_se) {
        sh["se_pi1"] = f.se_pi1;
        sh["se_pi2"] = f.se_pi2;
      }
      j["shelter"] = sh;
    }
  }
  return j;
}

std::string emit_fit_csv(const std::string& out_dir, const std::vector<ItemFit>& fits,
                         bool shelter_requested) {
  const std::string path = out_path(out_dir, "fit.csv");
  std::ofstream out = open_out(path);
  out << "item,n,pi,xi,se_pi,se_xi,loglik,bic,converged,boundary";
  if (shelter_requested)
    out << ",shelter_c,pi_star,xi_shelter,delta,se_pi_star,se_xi_shelter,se_delta,"
           "pi1,pi2,se_pi1,se_pi2,loglik_shelter,bic_shelter,lrt_stat,lrt_p,shelter_retained";
  out << ",error\n";
  for (const ItemFit& f : fits) {
    out << f.item << ',' << f.n;
    if (f.error.empty()) {
      const CubParams& b = f.base.base();
      out << ',' << fmt6(b.pi) << ',' << fmt6(b.xi);
      if (f.base.std_errors.size() == 2)
        out << ',' << fmt6(f.base.std_errors[0]) << ',' << fmt6(f.base.std_errors[1]);
      else
        out << ",,";
      out << ',' << fmt6(f.base.loglik) << ',' << fmt6(f.base.bic) << ','
          << (f.base.converged ? "true" : "false") << ',' << (f.base.boundary ? "true" : "false");
    } else {
      out << ",,,,,,,,";
    }
    if (shelter_requested) {
      if (f.error.empty() && f.shelter_error.empty() && f.shelter_tried) {
        const CubShelterParams& p = f.shelter_fit.shelter();
        out << ',' << p.c << ',' << fmt6(p.pi_star) << ',' << fmt6(p.xi) << ',' << fmt6(p.delta);
        if (f.shelter_fit.std_errors.size() == 3)
          out << ',' << fmt6(f.shelter_fit.std_errors[0]) << ','
              << fmt6(f.shelter_fit.std_errors[1]) << ',' << fmt6(f.shelter_fit.std_errors[2]);
        else
          out << ",,,";
        out << ',' << fmt6(p.pi1()) << ',' << fmt6(p.pi2());
        if (f.has_derived_se)
          out << ',' << fmt6(f.se_pi1) << ',' << fmt6(f.se_pi2);
        else
          out << ",,";
        out << ',' << fmt6(f.shelter_fit.loglik) << ',' << fmt6(f.shelter_fit.bic) << ','
            << fmt6(f.lrt.statistic) << ',' << fmt6(f.lrt.p_value) << ','
            << (f.shelter_retained ? "true" : "false");
      } else {
        out << ",,,,,,,,,,,,,,,";
      }
    }
    std::string err = f.error.empty() ? f.shelter_error : f.error;
    for (char& ch : err)
      if (ch == ',' || ch == '\n') ch = ';';
    out << ',' << err << '\n';
  }
  return path;
}

std::string emit_profiles_csv(const std::string& out_dir,
                              const std::vector<std::string>& item_names,
                              const std::vector<SystemProfiles>& systems) {
  const std::string path = out_path(out_dir, "profiles.csv");
  std::ofstream out = open_out(path);
  out << "item,system,category,mu,nu,u,score,accuracy\n";
  for (const SystemProfiles& sp : systems) {
    for (size_t k = 0; k < sp.profiles.size(); ++k) {
      if (!sp.profiles[k].has_value()) continue;
      const IfsProfile& p = *sp.profiles[k];
      for (int r = 1; r <= p.scale.m; ++r) {
        out << item_names[k] << ',' << to_string(sp.system) << ',' << r << ','
            << fmt6(p.mu_at(r));
        if (p.has_ifs()) {
          const IfsTriple t = p.triple(r);
          out << ',' << fmt6(t.nu) << ',' << fmt6(t.u) << ',' << fmt6(fuzzy_score(t)) << ','
              << fmt6(fuzzy_accuracy(t));
        } else {
          out << ",,,,";
        }
        out << '\n';
      }
    }
  }
  return path;
}

void emit_aggregate_csvs(const std::string& out_dir, const std::vector<std::string>& item_names,
                         const PipelineData& data, const std::vector<SystemAggregate>& aggs,
                         const AnalysisConfig& cfg, RunOutcome& rc) {
  const std::string wpath = out_path(out_dir, "weights.csv");
  {
    std::ofstream out = open_out(wpath);
    out << "system,item,g,weight\n";
    for (const SystemAggregate& a : aggs) {
      if (!a.ok()) continue;
      for (size_t k = 0; k < item_names.size(); ++k) {
        out << to_string(a.system) << ',' << item_names[k] << ',';
        if (!a.g.empty()) out << fmt6(a.g[k]);
        out << ',' << fmt6(a.weights[static_cast<int>(k)]) << '\n';
      }
    }
  }
  rc.files.push_back(wpath);

  const std::string ipath = out_path(out_dir, "items.csv");
  {
    std::ofstream out = open_out(ipath);
    out << "system,item,mu_bar,nu_bar,u_bar,s_bar,a_bar\n";
    for (const SystemAggregate& a : aggs) {
      if (!a.ok()) continue;
      for (size_t k = 0; k < item_names.size(); ++k) {
        out << to_string(a.system) << ',' << item_names[k] << ',' << fmt6(a.item_mu[k]);
        if (!a.membership_only)
          out << ',' << fmt6(a.item_nu[k]) << ',' << fmt6(a.item_u[k]) << ','
              << fmt6(a.item_s[k]) << ',' << fmt6(a.item_a[k]);
        else
          out << ",,,,";
        out << '\n';
      }
    }
  }
  rc.files.push_back(ipath);

  const std::string cpath = out_path(out_dir, "composite.csv");
  {
    std::ofstream out = open_out(cpath);
    out << "system,weights_scheme,n_respondents,mu_bar,nu_bar,u_bar,s_bar,a_bar\n";
    for (const SystemAggregate& a : aggs) {
      if (!a.ok()) continue;
      out << to_string(a.system) << ',' << to_string(cfg.weights) << ','
          << data.complete.size() << ',' << fmt6(a.mu_bar);
      if (!a.membership_only)
        out << ',' << fmt6(a.nu_bar) << ',' << fmt6(a.u_bar) << ',' << fmt6(a.s_bar) << ','
            << fmt6(a.a_bar);
      else
        out << ",,,,";
      out << '\n';
    }
  }
  rc.files.push_back(cpath);

  const std::string rpath = out_path(out_dir, "respondents.csv");
  {
    std::ofstream out = open_out(rpath);
    out << "system,row,mu,nu\n";
    for (const SystemAggregate& a : aggs) {
      if (!a.ok()) continue;
      for (size_t j = 0; j < a.per_respondent.size(); ++j) {
        out << to_string(a.system) << ',' << data.complete_index[j] << ','
            << fmt6(a.per_respondent[j].mu) << ',';
        if (!a.membership_only) out << fmt6(a.per_respondent[j].nu);
        out << '\n';
      }
    }
  }
  rc.files.push_back(rpath);
}

json aggregate_json(const std::vector<std::string>& item_names,
                    const std::vector<SystemAggregate>& aggs) {
  json out = json::array();
  for (const SystemAggregate& a : aggs) {
    json j{{"system", to_string(a.system)}};
    if (!a.ok()) {
      j["error"] = a.error;
      out.push_back(j);
      continue;
    }
    j["weights"] = a.weights.w;
    if (!a.g.empty()) j["g"] = a.g;
    json items = json::array();
    for (size_t k = 0; k < item_names.size(); ++k) {
      json it{{"item", item_names[k]}, {"mu_bar", a.item_mu[k]}};
      if (!a.membership_only) {
        it["nu_bar"] = a.item_nu[k];
        it["u_bar"] = a.item_u[k];
        it["s_bar"] = a.item_s[k];
        it["a_bar"] = a.item_a[k];
      }
      items.push_back(it);
    }
    j["items"] = items;
    json comp{{"mu_bar", a.mu_bar}};
    if (!a.membership_only) {
      comp["nu_bar"] = a.nu_bar;
      comp["u_bar"] = a.u_bar;
      comp["s_bar"] = a.s_bar;
      comp["a_bar"] = a.a_bar;
      comp["u_bar_identity_gap"] = a.identity_gap;
    }
    j["composite"] = comp;
    out.push_back(j);
  }
  return out;
}

void print_fit_summary(const std::vector<ItemFit>& fits) {
  for (const ItemFit& f : fits) {
    if (!f.error.empty()) {
      std::cout << "  " << f.item << ": ERROR " << f.error << '\n';
      continue;
    }
    const CubParams& b = f.base.base();
    std::cout << "  " << f.item << ": n=" << f.n << " pi=" << fmt6(b.pi) << " xi=" << fmt6(b.xi)
              << " loglik=" << fmt6(f.base.loglik) << " bic=" << fmt6(f.base.bic);
    if (f.shelter_tried) {
      if (!f.shelter_error.empty()) {
        std::cout << " shelter ERROR " << f.shelter_error;
      } else {
        const CubShelterParams& p = f.shelter_fit.shelter();
        std::cout << " | shelter c=" << p.c << " delta=" << fmt6(p.delta) << " pi1="
                  << fmt6(p.pi1()) << " lrt_p=" << fmt6(f.lrt.p_value)
                  << (f.shelter_retained ? " retained" : " rejected");
      }
    }
    std::cout << '\n';
  }
}

bool all_fits_ok(const std::vector<ItemFit>& fits) {
  for (const ItemFit& f : fits)
    if (!f.ok()) return false;
  return true;
}

}  // namespace

PipelineData prepare_data(const RatingsTable& table, const AnalysisConfig& cfg) {
  const RatingScale declared = resolve_scale(cfg.scale);
  PipelineData data{table, declared, false, {}, {}, {}};
  if (declared.orientation == Orientation::negative) {
    data.scale = reversed(declared);
    data.orientation_normalized = true;
  }
  for (int k = 0; k < table.items(); ++k) {
    RatingSample s = item_sample(table, k, data.scale);
    if (data.orientation_normalized) s = reverse_sample(s, data.scale);
    data.samples.push_back(std::move(s));
  }
  data.complete = complete_rows(table, data.scale);
  if (data.orientation_normalized)
    for (std::vector<int>& row : data.complete)
      for (int& r : row) r = data.scale.m - r + 1;
  for (size_t j = 0; j < table.rows.size(); ++j) {
    bool complete = true;
    for (const std::optional<int>& cell : table.rows[j])
      if (!cell.has_value()) {
        complete = false;
        break;
      }
    if (complete) data.complete_index.push_back(static_cast<long>(j) + 1);
  }
  return data;
}

double ItemFit::pi1() const {
  if (shelter_retained) return shelter_fit.pi1();
  return base.pi1();
}

std::vector<ItemFit> fit_items(const PipelineData& data, const AnalysisConfig& cfg) {
  std::vector<ItemFit> fits;
  fits.reserve(data.samples.size());
  for (size_t k = 0; k < data.samples.size(); ++k) {
    const RatingSample& sample = data.samples[k];
    ItemFit f;
    f.item = data.table.item_names[k];
    f.n = sample.n;
    try {
      f.base = fit_cub(sample, cfg.em);
    } catch (const std::exception& e) {
      f.error = e.what();
      fits.push_back(std::move(f));
      continue;
    }
    if (cfg.shelter != ShelterMode::none) {
      f.shelter_tried = true;
      try {
        f.shelter_fit = cfg.shelter == ShelterMode::fixed
                            ? fit_cub_shelter(sample, cfg.shelter_c, cfg.em)
                            : fit_cub_shelter_auto(sample, cfg.em);
        f.lrt = lr_test(f.base, f.shelter_fit, sample.n);
        f.shelter_retained = f.lrt.p_value < cfg.alpha;
        if (f.shelter_retained && !f.shelter_fit.boundary) {
          try {
            const ShelterDerivedSe d = shelter_derived_std_errors(f.shelter_fit, sample);
            f.se_pi1 = d.pi1;
            f.se_pi2 = d.pi2;
            f.has_derived_se = true;
          } catch (const std::exception&) {
            // ill-conditioned information; derived errors stay absent
          }
        }
      } catch (const std::exception& e) {
        f.shelter_error = e.what();
      }
    }
    fits.push_back(std::move(f));
  }
  return fits;
}

bool SystemProfiles::all_ok() const {
  for (const std::string& e : errors)
    if (!e.empty()) return false;
  return true;
}

std::vector<SystemProfiles> build_profiles(const PipelineData& data,
                                           const std::vector<ItemFit>& fits,
                                           const AnalysisConfig& cfg) {
  const size_t k_items = data.samples.size();
  std::vector<SystemProfiles> out;
  for (FuzzySystem system : cfg.systems) {
    SystemProfiles sp;
    sp.system = system;
    sp.profiles.resize(k_items);
    sp.errors.resize(k_items);
    if (system == FuzzySystem::cub_fuzzy)
      sp.pi1_used.assign(k_items, std::numeric_limits<double>::quiet_NaN());
    for (size_t k = 0; k < k_items; ++k) {
      try {
        switch (system) {
          case FuzzySystem::cub_fuzzy: {
            if (k >= fits.size() || !fits[k].ok())
              throw std::runtime_error("no usable fit for item '" + data.table.item_names[k] +
                                       "': " + (k < fits.size()
                                                    ? (fits[k].error.empty() ? fits[k].shelter_error
                                                                             : fits[k].error)
                                                    : "fit stage skipped"));
            const double pi1 = fits[k].pi1();
            sp.pi1_used[k] = pi1;
            sp.profiles[k] = cub_fuzzy_profile(edf(data.samples[k]), pi1, data.scale);
            break;
          }
          case FuzzySystem::spline:
            sp.profiles[k] = spline_profile(data.scale, cfg.spline);
            break;
          case FuzzySystem::empirical:
            sp.profiles[k] = empirical_profile(edf(data.samples[k]), data.scale);
            break;
        }
      } catch (const std::exception& e) {
        sp.errors[k] = e.what();
      }
    }
    out.push_back(std::move(sp));
  }
  return out;
}

std::vector<SystemAggregate> aggregate_systems(const PipelineData& data,
                                               const std::vector<SystemProfiles>& profiles,
                                               const AnalysisConfig& cfg) {
  const size_t k_items = data.samples.size();

  // per-item samples restricted to the listwise-complete rows
  std::vector<RatingSample> columns;
  if (!data.complete.empty()) {
    for (size_t k = 0; k < k_items; ++k) {
      std::vector<long> freq(static_cast<size_t>(data.scale.m), 0);
      for (const std::vector<int>& row : data.complete) ++freq[static_cast<size_t>(row[k]) - 1];
      columns.push_back(sample_from_freq(freq, data.scale.m));
    }
  }

  std::vector<SystemAggregate> out;
  for (const SystemProfiles& sp : profiles) {
    SystemAggregate agg;
    agg.system = sp.system;
    agg.membership_only = sp.system == FuzzySystem::empirical;
    try {
      if (data.complete.empty())
        throw std::runtime_error("empty complete-row subset: every data row has a missing value");
      if (!sp.all_ok()) {
        std::string msg = "profiles unavailable:";
        for (size_t k = 0; k < sp.errors.size(); ++k)
          if (!sp.errors[k].empty()) msg += " [" + data.table.item_names[k] + "] " + sp.errors[k];
        throw std::runtime_error(msg);
      }
      std::vector<IfsProfile> profs;
      profs.reserve(k_items);
      for (const std::optional<IfsProfile>& p : sp.profiles) profs.push_back(*p);

      switch (cfg.weights) {
        case WeightScheme::uncertainty:
          for (size_t k = 0; k < k_items; ++k)
            agg.g.push_back(fuzzy_prop_uncertainty(profs[k], columns[k]));
          agg.weights = log_inverse_weights(agg.g);
          break;
        case WeightScheme::membership:
          for (size_t k = 0; k < k_items; ++k)
            agg.g.push_back(fuzzy_prop_membership(profs[k], columns[k]));
          agg.weights = log_inverse_weights(agg.g);
          break;
        case WeightScheme::uniform:
          agg.weights = uniform_weights(static_cast<int>(k_items));
          break;
        case WeightScheme::custom: {
          std::vector<double> w = load_weight_file(cfg.weights_path);
          if (w.size() != k_items)
            throw std::runtime_error(cfg.weights_path + ": " + std::to_string(w.size()) +
                                     " weights for " + std::to_string(k_items) + " items");
          agg.weights = make_weights(std::move(w));
          break;
        }
      }

      for (size_t k = 0; k < k_items; ++k) {
        agg.item_mu.push_back(fuzzy_prop_membership(profs[k], columns[k]));
        if (!agg.membership_only) {
          double nu_mean = 0.0;
          for (int r = 1; r <= data.scale.m; ++r)
            nu_mean += static_cast<double>(columns[k].freq[static_cast<size_t>(r) - 1]) *
                       profs[k].nu_at(r);
          nu_mean /= static_cast<double>(columns[k].n);
          agg.item_nu.push_back(nu_mean);
          agg.item_u.push_back(fuzzy_prop_uncertainty(profs[k], columns[k]));
          agg.item_s.push_back(agg.item_mu[k] - nu_mean);
          agg.item_a.push_back(agg.item_mu[k] + nu_mean);
        }
      }

      if (agg.membership_only) {
        double mu_sum = 0.0;
        for (const std::vector<int>& row : data.complete) {
          double mu = 0.0;
          for (size_t k = 0; k < k_items; ++k)
            mu += agg.weights[static_cast<int>(k)] * profs[k].mu_at(row[k]);
          agg.per_respondent.push_back(RespondentAggregate{mu, 0.0});
          mu_sum += mu;
        }
        agg.mu_bar = mu_sum / static_cast<double>(data.complete.size());
      } else {
        const CompositeResult comp = composite(data.complete, profs, agg.weights);
        agg.mu_bar = comp.mu_bar;
        agg.nu_bar = comp.nu_bar;
        agg.u_bar = comp.u_bar;
        agg.s_bar = comp.s_bar;
        agg.a_bar = comp.a_bar;
        agg.per_respondent = comp.per_respondent;
        double u_weighted = 0.0;
        for (size_t k = 0; k < k_items; ++k)
          u_weighted += agg.weights[static_cast<int>(k)] * agg.item_u[k];
        agg.identity_gap = std::abs(agg.u_bar - u_weighted);
      }
    } catch (const std::exception& e) {
      agg.error = e.what();
    }
    out.push_back(std::move(agg));
  }
  return out;
}

RunOutcome cmd_fit(const AnalysisConfig& cfg, const std::string& data_path,
                   const std::string& out_dir) {
  RunOutcome rc;
  json run{{"command", "fit"}, {"data", data_path}, {"config", config_json(cfg)}};
  try {
    const RatingsTable table = ingest_csv(data_path);
    const PipelineData data = prepare_data(table, cfg);
    run["scale"] = scale_json(data.scale);
    run["orientation_normalized"] = data.orientation_normalized;
    const std::vector<ItemFit> fits = fit_items(data, cfg);
    rc.files.push_back(emit_fit_csv(out_dir, fits, cfg.shelter != ShelterMode::none));
    json items = json::array();
    for (const ItemFit& f : fits) items.push_back(item_fit_json(f));
    run["items"] = items;
    rc.ok = all_fits_ok(fits);
    std::cout << "fit: " << fits.size() << " item(s)\n";
    print_fit_summary(fits);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    run["error"] = e.what();
    rc.ok = false;
  }
  write_run_json(out_dir, run, rc);
  return rc;
}

RunOutcome cmd_fuzzy(const AnalysisConfig& cfg, const std::string& data_path,
                     const std::string& out_dir) {
  RunOutcome rc;
  json run{{"command", "fuzzy"}, {"data", data_path}, {"config", config_json(cfg)}};
  try {
    const RatingsTable table = ingest_csv(data_path);
    const PipelineData data = prepare_data(table, cfg);
    run["scale"] = scale_json(data.scale);
    run["orientation_normalized"] = data.orientation_normalized;
    std::vector<ItemFit> fits;
    bool needs_fit = false;
    for (FuzzySystem s : cfg.systems) needs_fit |= s == FuzzySystem::cub_fuzzy;
    if (needs_fit) fits = fit_items(data, cfg);
    const std::vector<SystemProfiles> profiles = build_profiles(data, fits, cfg);
    rc.files.push_back(emit_profiles_csv(out_dir, table.item_names, profiles));
    json systems = json::array();
    bool ok = true;
    for (const SystemProfiles& sp : profiles) {
      json j{{"system", to_string(sp.system)}};
      json errors = json::array();
      for (size_t k = 0; k < sp.errors.size(); ++k)
        if (!sp.errors[k].empty()) {
          errors.push_back(json{{"item", table.item_names[k]}, {"error", sp.errors[k]}});
          ok = false;
        }
      if (!errors.empty()) j["errors"] = errors;
      if (!sp.pi1_used.empty()) {
        json pi1 = json::array();
        for (size_t k = 0; k < sp.pi1_used.size(); ++k)
          if (std::isnan(sp.pi1_used[k])) pi1.push_back(nullptr);
          else pi1.push_back(sp.pi1_used[k]);
        j["pi1_used"] = pi1;
      }
      systems.push_back(j);
    }
    run["systems"] = systems;
    rc.ok = ok;
    std::cout << "fuzzy: profiles for " << table.items() << " item(s), " << cfg.systems.size()
              << " system(s)\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    run["error"] = e.what();
    rc.ok = false;
  }
  write_run_json(out_dir, run, rc);
  return rc;
}

RunOutcome cmd_aggregate(const AnalysisConfig& cfg, const std::string& data_path,
                         const std::string& out_dir) {
  RunOutcome rc;
  json run{{"command", "aggregate"}, {"data", data_path}, {"config", config_json(cfg)}};
  try {
    const RatingsTable table = ingest_csv(data_path);
    const PipelineData data = prepare_data(table, cfg);
    run["scale"] = scale_json(data.scale);
    run["orientation_normalized"] = data.orientation_normalized;
    run["complete_rows"] = data.complete.size();
    std::vector<ItemFit> fits;
    bool needs_fit = false;
    for (FuzzySystem s : cfg.systems) needs_fit |= s == FuzzySystem::cub_fuzzy;
    if (needs_fit) fits = fit_items(data, cfg);
    const std::vector<SystemProfiles> profiles = build_profiles(data, fits, cfg);
    const std::vector<SystemAggregate> aggs = aggregate_systems(data, profiles, cfg);
    emit_aggregate_csvs(out_dir, table.item_names, data, aggs, cfg, rc);
    run["aggregate"] = aggregate_json(table.item_names, aggs);
    rc.ok = true;
    for (const SystemAggregate& a : aggs) {
      if (!a.ok()) {
        rc.ok = false;
        std::cerr << "error (" << to_string(a.system) << "): " << a.error << '\n';
        continue;
      }
      std::cout << to_string(a.system) << " composite: mu=" << fmt6(a.mu_bar);
      if (!a.membership_only)
        std::cout << " nu=" << fmt6(a.nu_bar) << " u=" << fmt6(a.u_bar) << " s=" << fmt6(a.s_bar)
                  << " a=" << fmt6(a.a_bar);
      std::cout << " (" << data.complete.size() << " complete rows)\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    run["error"] = e.what();
    rc.ok = false;
  }
  write_run_json(out_dir, run, rc);
  return rc;
}

RunOutcome cmd_report(const AnalysisConfig& cfg, const std::string& data_path,
                      const std::string& out_dir) {
  RunOutcome rc;
  json run{{"command", "report"}, {"data", data_path}, {"config", config_json(cfg)}};
  try {
    const RatingsTable table = ingest_csv(data_path);
    const PipelineData data = prepare_data(table, cfg);
    run["scale"] = scale_json(data.scale);
    run["orientation_normalized"] = data.orientation_normalized;
    run["complete_rows"] = data.complete.size();

    const std::vector<ItemFit> fits = fit_items(data, cfg);
    rc.files.push_back(emit_fit_csv(out_dir, fits, cfg.shelter != ShelterMode::none));
    json items = json::array();
    for (const ItemFit& f : fits) items.push_back(item_fit_json(f));
    run["items"] = items;
    rc.ok = all_fits_ok(fits);
    std::cout << "fit: " << fits.size() << " item(s)\n";
    print_fit_summary(fits);

    const std::vector<SystemProfiles> profiles = build_profiles(data, fits, cfg);
    rc.files.push_back(emit_profiles_csv(out_dir, table.item_names, profiles));
    for (const SystemProfiles& sp : profiles)
      if (!sp.all_ok()) rc.ok = false;

    const std::vector<SystemAggregate> aggs = aggregate_systems(data, profiles, cfg);
    emit_aggregate_csvs(out_dir, table.item_names, data, aggs, cfg, rc);
    run["aggregate"] = aggregate_json(table.item_names, aggs);
    for (const SystemAggregate& a : aggs) {
      if (!a.ok()) {
        rc.ok = false;
        std::cerr << "error (" << to_string(a.system) << "): " << a.error << '\n';
        continue;
      }
      std::cout << to_string(a.system) << " composite: mu=" << fmt6(a.mu_bar);
      if (!a.membership_only)
        std::cout << " nu=" << fmt6(a.nu_bar) << " u=" << fmt6(a.u_bar) << " s=" << fmt6(a.s_bar)
                  << " a=" << fmt6(a.a_bar);
      std::cout << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    run["error"] = e.what();
    rc.ok = false;
  }
  write_run_json(out_dir, run, rc);
  return rc;
}

RunOutcome cmd_simulate(const AnalysisConfig& cfg, const std::string& out_dir) {
  RunOutcome rc;
  json run{{"command", "simulate"}, {"config", config_json(cfg)}};
  try {
    const RatingScale scale = resolve_scale(cfg.scale);
    run["scale"] = scale_json(scale);
    const SimulateSpec& sim = cfg.simulate;
    if (sim.c != 0 && (sim.c < 1 || sim.c > scale.m))
      throw std::invalid_argument("simulate.c outside 1.." + std::to_string(scale.m));
    if (sim.c != 0 && !(sim.delta >= 0.0 && sim.delta < 1.0))
      throw std::invalid_argument("simulate.delta outside [0,1)");
    json cells = json::array();
    std::uint64_t cell = 0;
    for (double pi : sim.pi) {
      for (double xi : sim.xi) {
        const std::uint64_t seed = cfg.seed + cell;
        RatingSample sample =
            sim.c != 0
                ? simulate(CubShelterParams{pi, xi, sim.delta, sim.c}, scale.m, sim.n, seed)
                : simulate(CubParams{pi, xi}, scale.m, sim.n, seed);
        const std::string name = "sim_pi" + fmtg(pi) + "_xi" + fmtg(xi) + ".csv";
        const std::string path = out_path(out_dir, name);
        std::vector<std::vector<int>> rows;
        rows.reserve(sample.ratings.size());
        for (int r : sample.ratings) rows.push_back({r});
        write_ratings_csv(path, {"rating"}, rows);
        rc.files.push_back(path);
        json c{{"pi", pi}, {"xi", xi}, {"n", sim.n}, {"seed", seed}, {"file", path}};
        if (sim.c != 0) {
          c["delta"] = sim.delta;
          c["c"] = sim.c;
        }
        cells.push_back(c);
        ++cell;
      }
    }
    run["cells"] = cells;
    std::cout << "simulate: wrote " << cell << " file(s) of n=" << sim.n << " ratings each\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    run["error"] = e.what();
    rc.ok = false;
  }
  write_run_json(out_dir, run, rc);
  return rc;
}

RunOutcome cmd_distance(const std::string& path_a, const std::string& path_b,
                        const std::string& out_dir) {
  RunOutcome rc;
  json run{{"command", "distance"}, {"file_a", path_a}, {"file_b", path_b}};
  try {
    const std::vector<IfsTriple> a = read_ifs_csv(path_a);
    const std::vector<IfsTriple> b = read_ifs_csv(path_b);
    const double d = hamming_distance(std::span<const IfsTriple>(a.data(), a.size()),
                                      std::span<const IfsTriple>(b.data(), b.size()));
    std::cout << "d_H = (1 / (2 n)) * sum_i (|mu_B - mu_C| + |nu_B - nu_C| + |u_B - u_C|)\n"
              << "n = " << a.size() << '\n'
              << "d_H = " << fmt6(d) << '\n';
    run["n"] = a.size();
    run["d_h"] = d;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    run["error"] = e.what();
    rc.ok = false;
  }
  write_run_json(out_dir, run, rc);
  return rc;
}

}  // namespace cubfuzz

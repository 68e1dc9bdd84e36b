#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fermiscale/fluctent.hpp"
#include "fermiscale/io.hpp"
#include "fermiscale/model.hpp"
#include "fermiscale/response.hpp"
#include "fermiscale/scaling.hpp"
#include "fermiscale/structfact.hpp"
#include "fermiscale/svg.hpp"

namespace fermiscale {

struct WindowSpec {
    bool automatic = true;
    std::vector<int> reference_dims;   // automatic form
    int step_axis = 0;
    double delta_omega = 0.0;          // explicit form
};

struct FrequencyGridSpec {
    bool automatic = true;
    double spacing_over_delta = 0.25;
    double padding_over_delta = 2.0;
    double min = 0.0, max = 0.0, spacing = 0.0;   // explicit form
};

struct DriveSpec {
    std::string type;   // "gaussian_pulse" | "monochromatic"
    double f0 = 0.0;
    double center = 0.0;
    double sigma = 0.0;

    DriveSpectrum resolve() const {
        if (type == "gaussian_pulse") return DriveSpectrum::gaussian_pulse(f0, center, sigma);
        if (type == "monochromatic") return DriveSpectrum::monochromatic(f0, center);
        throw std::invalid_argument("unknown drive type '" + type + "'");
    }
};

struct AnalysisSpec {
    std::optional<double> fit_omega0;   // default: middle of the transition range
    bool collapse = true;
};

/// Declarative description of one experiment: a model, a size series, a
/// region rule, coarse-graining and grid choices, and what to analyze.
struct ExperimentConfig {
    int schema_version = 1;
    std::string model;
    std::map<std::string, double> params;
    std::vector<std::vector<int>> sizes;
    std::string region_kind;                      // "half_square" | "strip" | "sites"
    std::vector<std::vector<int>> region_sites;   // for "sites"
    double temperature = 0.0;
    WindowSpec window;
    FrequencyGridSpec frequency_grid;
    AnalysisSpec analysis;
    std::optional<DriveSpec> drive;
    std::string output_dir;

    json canonical() const;
    std::string hash() const { return hash_hex(canonical().dump()); }
};

struct ValidationResult {
    std::optional<ExperimentConfig> config;
    std::vector<std::string> errors;
    bool ok() const { return errors.empty(); }
};

namespace detail {

inline void check_keys(const json& obj, const std::string& path,
                       std::initializer_list<const char*> allowed,
                       std::vector<std::string>& errors) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) { known = true; break; }
        if (!known) errors.push_back(path + ": unknown key '" + it.key() + "'");
    }
}

} // namespace detail

/// Parses and cross-checks a config. Unknown keys are errors (strict mode);
/// all problems are collected with their field paths rather than stopping at
/// the first one.
inline ValidationResult validate_config(const std::string& text) {
    ValidationResult result;
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        result.errors.push_back(std::string("config: not valid JSON: ") + e.what());
        return result;
    }
    if (!j.is_object()) {
        result.errors.push_back("config: top level must be an object");
        return result;
    }
    auto& errors = result.errors;
    detail::check_keys(j, "config",
                       {"schema_version", "model", "params", "sizes", "region", "temperature",
                        "window", "frequency_grid", "analysis", "drive", "output_dir"},
                       errors);

    ExperimentConfig cfg;
    if (!j.contains("schema_version") || !j["schema_version"].is_number_integer())
        errors.push_back("schema_version: required integer");
    else if ((cfg.schema_version = j["schema_version"].get<int>()) != 1)
        errors.push_back("schema_version: unsupported version " +
                         std::to_string(cfg.schema_version));

    int model_dim = 0;
    if (!j.contains("model") || !j["model"].is_string()) {
        errors.push_back("model: required string");
    } else {
        cfg.model = j["model"].get<std::string>();
        if (j.contains("params")) {
            if (!j["params"].is_object()) {
                errors.push_back("params: must be an object of numbers");
            } else {
                for (auto it = j["params"].begin(); it != j["params"].end(); ++it) {
                    if (!it.value().is_number())
                        errors.push_back("params." + it.key() + ": must be a number");
                    else
                        cfg.params[it.key()] = it.value().get<double>();
                }
            }
        }
        try {
            model_dim = make_model(cfg.model, cfg.params).dimension();
        } catch (const std::exception& e) {
            errors.push_back(std::string("model/params: ") + e.what());
        }
    }

    if (!j.contains("sizes") || !j["sizes"].is_array() || j["sizes"].empty()) {
        errors.push_back("sizes: required non-empty array of dimension lists");
    } else {
        for (std::size_t i = 0; i < j["sizes"].size(); ++i) {
            const auto& s = j["sizes"][i];
            const std::string path = "sizes[" + std::to_string(i) + "]";
            if (!s.is_array() || s.empty()) {
                errors.push_back(path + ": must be a non-empty array of integers");
                continue;
            }
            std::vector<int> dims;
            for (const auto& n : s) {
                if (!n.is_number_integer()) {
                    errors.push_back(path + ": entries must be integers");
                    break;
                }
                dims.push_back(n.get<int>());
            }
            if (model_dim && static_cast<int>(dims.size()) != model_dim)
                errors.push_back(path + ": expected " + std::to_string(model_dim) +
                                 " dimensions for model '" + cfg.model + "'");
            for (int n : dims)
                if (n < 2) errors.push_back(path + ": every axis needs N >= 2");
            cfg.sizes.push_back(std::move(dims));
        }
    }

    if (!j.contains("region")) {
        errors.push_back("region: required");
    } else if (j["region"].is_string()) {
        cfg.region_kind = j["region"].get<std::string>();
        if (cfg.region_kind != "half_square" && cfg.region_kind != "strip")
            errors.push_back("region: unknown kind '" + cfg.region_kind + "'");
        if (cfg.region_kind == "half_square")
            for (std::size_t i = 0; i < cfg.sizes.size(); ++i)
                for (int n : cfg.sizes[i])
                    if (n % 2 != 0)
                        errors.push_back("sizes[" + std::to_string(i) +
                                         "]: half_square region needs even N, got " +
                                         std::to_string(n));
        if (cfg.region_kind == "strip" && model_dim && model_dim != 2)
            errors.push_back("region: strip regions need a two-dimensional model");
    } else if (j["region"].is_object()) {
        detail::check_keys(j["region"], "region", {"sites"}, errors);
        cfg.region_kind = "sites";
        if (!j["region"].contains("sites") || !j["region"]["sites"].is_array())
            errors.push_back("region.sites: required array of coordinate tuples");
        else
            try {
                cfg.region_sites =
                    j["region"]["sites"].get<std::vector<std::vector<int>>>();
            } catch (const std::exception&) {
                errors.push_back("region.sites: entries must be integer tuples");
            }
    } else {
        errors.push_back("region: must be a string or an object");
    }

    if (j.contains("temperature")) {
        if (!j["temperature"].is_number() || j["temperature"].get<double>() < 0.0)
            errors.push_back("temperature: must be a number >= 0");
        else
            cfg.temperature = j["temperature"].get<double>();
    }

    if (!j.contains("window") || !j["window"].is_object()) {
        errors.push_back("window: required object");
    } else {
        const auto& w = j["window"];
        detail::check_keys(w, "window", {"reference_dims", "step_axis", "delta_omega"}, errors);
        if (w.contains("delta_omega")) {
            cfg.window.automatic = false;
            if (!w["delta_omega"].is_number() || !(w["delta_omega"].get<double>() > 0.0))
                errors.push_back("window.delta_omega: must be > 0");
            else
                cfg.window.delta_omega = w["delta_omega"].get<double>();
            if (w.contains("reference_dims") || w.contains("step_axis"))
                errors.push_back("window: give either delta_omega or reference_dims/step_axis");
        } else {
            cfg.window.automatic = true;
            if (!w.contains("reference_dims") || !w["reference_dims"].is_array())
                errors.push_back("window.reference_dims: required for automatic window");
            else {
                try {
                    cfg.window.reference_dims = w["reference_dims"].get<std::vector<int>>();
                } catch (const std::exception&) {
                    errors.push_back("window.reference_dims: must be an integer array");
                }
                if (model_dim &&
                    static_cast<int>(cfg.window.reference_dims.size()) != model_dim)
                    errors.push_back("window.reference_dims: dimension mismatch with model");
            }
            if (!w.contains("step_axis") || !w["step_axis"].is_number_integer())
                errors.push_back("window.step_axis: required integer");
            else {
                cfg.window.step_axis = w["step_axis"].get<int>();
                if (model_dim &&
                    (cfg.window.step_axis < 0 || cfg.window.step_axis >= model_dim))
                    errors.push_back("window.step_axis: out of range");
            }
        }
    }

    if (j.contains("frequency_grid")) {
        const auto& g = j["frequency_grid"];
        if (!g.is_object()) {
            errors.push_back("frequency_grid: must be an object");
        } else {
            detail::check_keys(
                g, "frequency_grid",
                {"spacing_over_delta", "padding_over_delta", "min", "max", "spacing"}, errors);
            if (g.contains("min") || g.contains("max") || g.contains("spacing")) {
                cfg.frequency_grid.automatic = false;
                for (const char* k : {"min", "max", "spacing"})
                    if (!g.contains(k) || !g[k].is_number())
                        errors.push_back(std::string("frequency_grid.") + k +
                                         ": required number for an explicit grid");
                if (errors.empty()) {
                    cfg.frequency_grid.min = g["min"].get<double>();
                    cfg.frequency_grid.max = g["max"].get<double>();
                    cfg.frequency_grid.spacing = g["spacing"].get<double>();
                    if (!(cfg.frequency_grid.spacing > 0.0) ||
                        !(cfg.frequency_grid.max > cfg.frequency_grid.min))
                        errors.push_back("frequency_grid: need max > min and spacing > 0");
                }
            } else {
                if (g.contains("spacing_over_delta"))
                    cfg.frequency_grid.spacing_over_delta = g["spacing_over_delta"].get<double>();
                if (g.contains("padding_over_delta"))
                    cfg.frequency_grid.padding_over_delta = g["padding_over_delta"].get<double>();
                if (!(cfg.frequency_grid.spacing_over_delta > 0.0) ||
                    cfg.frequency_grid.spacing_over_delta > 0.25 + 1e-12)
                    errors.push_back("frequency_grid.spacing_over_delta: must be in (0, 0.25]");
            }
        }
    }

    if (j.contains("analysis")) {
        const auto& a = j["analysis"];
        if (!a.is_object()) {
            errors.push_back("analysis: must be an object");
        } else {
            detail::check_keys(a, "analysis", {"fit_omega0", "collapse"}, errors);
            if (a.contains("fit_omega0")) {
                if (!a["fit_omega0"].is_number())
                    errors.push_back("analysis.fit_omega0: must be a number");
                else
                    cfg.analysis.fit_omega0 = a["fit_omega0"].get<double>();
            }
            if (a.contains("collapse")) {
                if (!a["collapse"].is_boolean())
                    errors.push_back("analysis.collapse: must be a boolean");
                else
                    cfg.analysis.collapse = a["collapse"].get<bool>();
            }
        }
    }

    if (j.contains("drive")) {
        const auto& d = j["drive"];
        if (!d.is_object()) {
            errors.push_back("drive: must be an object");
        } else {
            detail::check_keys(d, "drive", {"type", "f0", "center", "sigma"}, errors);
            DriveSpec spec;
            if (!d.contains("type") || !d["type"].is_string())
                errors.push_back("drive.type: required string");
            else
                spec.type = d["type"].get<std::string>();
            for (const char* k : {"f0", "center"})
                if (!d.contains(k) || !d[k].is_number())
                    errors.push_back(std::string("drive.") + k + ": required number");
            if (d.contains("f0") && d["f0"].is_number()) spec.f0 = d["f0"].get<double>();
            if (d.contains("center") && d["center"].is_number())
                spec.center = d["center"].get<double>();
            if (spec.type == "gaussian_pulse") {
                if (!d.contains("sigma") || !d["sigma"].is_number() ||
                    !(d["sigma"].get<double>() > 0.0))
                    errors.push_back("drive.sigma: required positive number");
                else
                    spec.sigma = d["sigma"].get<double>();
            } else if (spec.type == "monochromatic") {
                if (d.contains("sigma")) errors.push_back("drive.sigma: not valid here");
            } else if (!spec.type.empty()) {
                errors.push_back("drive.type: unknown type '" + spec.type + "'");
            }
            // the absorption integral and the reactive reconstruction are
            // ground-state relations
            if (cfg.temperature > 0.0)
                errors.push_back("drive: response outputs need temperature = 0");
            cfg.drive = spec;
        }
    }

    if (j.contains("output_dir")) {
        if (!j["output_dir"].is_string())
            errors.push_back("output_dir: must be a string");
        else
            cfg.output_dir = j["output_dir"].get<std::string>();
    }

    if (errors.empty()) result.config = std::move(cfg);
    return result;
}

inline json ExperimentConfig::canonical() const {
    json j;
    j["schema_version"] = schema_version;
    j["model"] = model;
    j["params"] = params;
    j["sizes"] = sizes;
    if (region_kind == "sites")
        j["region"] = json{{"sites", region_sites}};
    else
        j["region"] = region_kind;
    j["temperature"] = temperature;
    if (window.automatic)
        j["window"] = json{{"reference_dims", window.reference_dims},
                           {"step_axis", window.step_axis}};
    else
        j["window"] = json{{"delta_omega", window.delta_omega}};
    if (frequency_grid.automatic)
        j["frequency_grid"] = json{{"spacing_over_delta", frequency_grid.spacing_over_delta},
                                   {"padding_over_delta", frequency_grid.padding_over_delta}};
    else
        j["frequency_grid"] = json{{"min", frequency_grid.min},
                                   {"max", frequency_grid.max},
                                   {"spacing", frequency_grid.spacing}};
    json a;
    if (analysis.fit_omega0) a["fit_omega0"] = *analysis.fit_omega0;
    a["collapse"] = analysis.collapse;
    j["analysis"] = a;
    if (drive) {
        json d{{"type", drive->type}, {"f0", drive->f0}, {"center", drive->center}};
        if (drive->type == "gaussian_pulse") d["sigma"] = drive->sigma;
        j["drive"] = d;
    }
    return j;
}

struct RunRecord {
    std::string config_hash;
    bool complete = false;
    std::vector<std::string> size_labels;
    std::map<std::string, std::string> files;   // role -> path
    std::map<std::string, double> timings_s;
    std::string scaling_report_path;

    json to_json() const {
        json j;
        j["config_hash"] = config_hash;
        j["complete"] = complete;
        j["size_labels"] = size_labels;
        j["files"] = files;
        j["timings_s"] = timings_s;
        j["scaling_report"] = scaling_report_path;
        return j;
    }
};

struct RunOptions {
    std::string output_dir;    // overrides the config when non-empty
    bool plots = true;
    bool force_naive = false;  // oracle mode: evaluate via the literal sum
};

namespace detail {

inline std::string dims_label(const std::vector<int>& dims) {
    std::string s;
    for (std::size_t a = 0; a < dims.size(); ++a) s += (a ? "x" : "") + std::to_string(dims[a]);
    return s;
}

inline Region resolve_region(const ExperimentConfig& cfg, const std::vector<int>& dims) {
    if (cfg.region_kind == "half_square") {
        std::vector<int> len(dims.size());
        for (std::size_t a = 0; a < dims.size(); ++a) len[a] = dims[a] / 2;
        return Region::box(len);
    }
    if (cfg.region_kind == "strip") return Region::box({dims[0], 1});
    return Region::from_sites(static_cast<int>(dims.size()), cfg.region_sites);
}

/// Linear size L entering F(L): half the edge for half squares, the strip
/// length for strips. Explicit site lists have no size series.
inline std::optional<double> region_linear_size(const ExperimentConfig& cfg,
                                                const std::vector<int>& dims) {
    if (cfg.region_kind == "half_square") return dims[0] / 2.0;
    if (cfg.region_kind == "strip") return static_cast<double>(dims[0]);
    return std::nullopt;
}

inline int analysis_dimension(const ExperimentConfig& cfg, int model_dim) {
    return cfg.region_kind == "strip" ? 1 : model_dim;
}

inline json scaling_fit_to_json(const ScalingFit& fit) {
    json j;
    j["chosen_law"] = law_name(fit.law);
    j["prefactor"] = fit.prefactor;
    json res;
    for (const auto& [law, r] : fit.per_law_residuals) res[law_name(law)] = r;
    j["residuals_per_law"] = res;
    return j;
}

} // namespace detail

/// Runs one experiment end to end: per size, build the mesh and model,
/// evaluate the smoothed structure factor (window fixed once at the
/// reference size), the static variance and entanglement entropy, and the
/// optional drive response; then fit the size scaling, measure the collapse,
/// and persist CSV/JSON artifacts plus optional SVG plots. A failure midway
/// still writes the run record, flagged incomplete.
inline RunRecord run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {}) {
    namespace fs = std::filesystem;
    using clock = std::chrono::steady_clock;
    const auto t_start = clock::now();

    RunRecord record;
    record.config_hash = cfg.hash();

    fs::path out_dir = options.output_dir.empty() ? fs::path(cfg.output_dir)
                                                  : fs::path(options.output_dir);
    if (out_dir.empty()) out_dir = "fermiscale_out";
    fs::create_directories(out_dir);

    auto seconds_since = [](clock::time_point t0) {
        return std::chrono::duration<double>(clock::now() - t0).count();
    };

    try {
        const BlochModel model = make_model(cfg.model, cfg.params);
        const Occupation occ = Occupation::from_temperature(cfg.temperature);

        // Coarse-graining width, fixed once and reused at every size.
        const std::vector<int> ref_dims =
            cfg.window.automatic ? cfg.window.reference_dims : cfg.sizes.front();
        const MomentumMesh ref_mesh = build_mesh(ref_dims);
        const double delta_omega = cfg.window.automatic
                                       ? select_window(model, ref_mesh, cfg.window.step_axis)
                                       : cfg.window.delta_omega;
        const BoxKernel kernel(delta_omega);

        // One frequency grid shared by all sizes (collapse needs a common grid).
        std::vector<double> grid;
        if (cfg.frequency_grid.automatic) {
            const BandTable ref_table(model, ref_mesh);
            grid = default_omega0_grid(ref_table, delta_omega, !occ.is_zero_temperature(),
                                       cfg.frequency_grid.spacing_over_delta,
                                       cfg.frequency_grid.padding_over_delta);
        } else {
            const int n = static_cast<int>(std::floor(
                              (cfg.frequency_grid.max - cfg.frequency_grid.min) /
                              cfg.frequency_grid.spacing)) + 1;
            for (int i = 0; i < n; ++i)
                grid.push_back(cfg.frequency_grid.min + i * cfg.frequency_grid.spacing);
        }

        std::map<double, SpectrumSeries> curves;
        SizeSeries sbar_series{{}, 0, "sbar_at_fixed_omega0"};
        SizeSeries var_series{{}, 0, "particle_variance"};
        SizeSeries ent_series{{}, 0, "vn_entropy"};
        SizeSeries abs_series{{}, 0, "absorption_rate"};
        std::vector<std::vector<double>> fluct_rows;

        const int ana_dim = detail::analysis_dimension(cfg, model.dimension());
        sbar_series.dimension = var_series.dimension = ent_series.dimension =
            abs_series.dimension = ana_dim;

        double fit_omega0;
        if (cfg.analysis.fit_omega0) {
            fit_omega0 = *cfg.analysis.fit_omega0;
        } else {
            const BandTable ref_table(model, ref_mesh);
            fit_omega0 = 0.5 * (ref_table.max_energy() - ref_table.min_energy());
        }
        const auto fit_bin = std::min_element(grid.begin(), grid.end(), [&](double a, double b) {
            return std::abs(a - fit_omega0) < std::abs(b - fit_omega0);
        });
        const std::size_t fit_index = static_cast<std::size_t>(fit_bin - grid.begin());

        std::optional<DriveSpectrum> drive;
        if (cfg.drive) drive = cfg.drive->resolve();

        for (const auto& dims : cfg.sizes) {
            const auto t_size = clock::now();
            const std::string label = detail::dims_label(dims);
            record.size_labels.push_back(label);

            const MomentumMesh mesh = build_mesh(dims);
            const Region region = detail::resolve_region(cfg, dims);
            if (!region.within(mesh.dims()))
                throw std::runtime_error("size " + label + ": region exceeds lattice");

            SpectrumSeries series =
                options.force_naive ? sbar_naive(model, mesh, region, occ, kernel, grid)
                                    : sbar(model, mesh, region, occ, kernel, grid);
            series.meta.wall_time_s = seconds_since(t_size);

            const fs::path csv = out_dir / ("sbar_" + label + ".csv");
            const fs::path sidecar = out_dir / ("sbar_" + label + ".meta.json");
            write_spectrum_csv(csv, series);
            write_spectrum_sidecar(sidecar, series);
            record.files["sbar_" + label] = csv.string();
            record.files["sbar_meta_" + label] = sidecar.string();

            const CorrelationMatrix corr = correlation_matrix(model, mesh, region, occ);
            const double variance = particle_variance(corr);
            const double entropy = vn_entropy(corr);

            const auto lsize = detail::region_linear_size(cfg, dims);
            if (lsize) {
                fluct_rows.push_back({*lsize, variance, entropy});
                sbar_series.entries.emplace_back(*lsize, series.value[fit_index]);
                var_series.entries.emplace_back(*lsize, variance);
                ent_series.entries.emplace_back(*lsize, entropy);
                curves.emplace(*lsize, series);
            } else {
                fluct_rows.push_back({static_cast<double>(region.site_count()), variance,
                                      entropy});
            }

            if (drive) {
                const double rate = absorption_rate(series, *drive);
                if (lsize) abs_series.entries.emplace_back(*lsize, rate);
                ResponseSeries chi = im_chi_from_noise(series, occ);
                fill_re_chi_kk(chi);
                std::vector<std::vector<double>> rows;
                for (std::size_t i = 0; i < chi.omega.size(); ++i)
                    rows.push_back({chi.omega[i], chi.im_chi[i], chi.re_chi[i]});
                const fs::path rcsv = out_dir / ("response_" + label + ".csv");
                write_csv(rcsv, "omega,im_chi,re_chi", rows);
                record.files["response_" + label] = rcsv.string();
                json aj;
                aj["drive"] = cfg.canonical()["drive"];
                aj["absorption_rate"] = rate;
                const fs::path ajson = out_dir / ("absorption_" + label + ".json");
                write_text_file(ajson, aj.dump(2) + "\n");
                record.files["absorption_" + label] = ajson.string();
            }
            record.timings_s["size_" + label] = seconds_since(t_size);
        }

        const fs::path fluct_csv = out_dir / "fluct_summary.csv";
        write_csv(fluct_csv, "size,variance,entropy", fluct_rows);
        record.files["fluct_summary"] = fluct_csv.string();

        // Scaling analysis over the size series.
        json report;
        report["config_hash"] = record.config_hash;
        report["delta_omega"] = delta_omega;
        report["fit_omega0"] = grid[fit_index];
        report["collapse_mask_fraction"] = 0.05;
        json quantities = json::array();
        auto add_report = [&](const SizeSeries& s) {
            if (s.entries.size() < 3) return;
            json q;
            q["label"] = s.label;
            q["dimension"] = s.dimension;
            try {
                const ScalingFit fit = fit_scaling(s);
                q.update(detail::scaling_fit_to_json(fit));
            } catch (const std::exception& e) {
                q["fit_error"] = e.what();
            }
            if (s.label == "sbar_at_fixed_omega0" && cfg.analysis.collapse && curves.size() >= 2) {
                json c;
                for (ScalingLaw law : kAllLaws)
                    c[law_name(law)] = collapse_residual(curves, law, s.dimension);
                q["collapse_residual"] = c;
            }
            quantities.push_back(q);
        };
        add_report(sbar_series);
        add_report(var_series);
        add_report(ent_series);
        if (!abs_series.entries.empty()) add_report(abs_series);
        report["quantities"] = quantities;

        const fs::path report_path = out_dir / "scaling_report.json";
        write_text_file(report_path, report.dump(2) + "\n");
        record.scaling_report_path = report_path.string();
        record.files["scaling_report"] = report_path.string();

        if (options.plots && curves.size() >= 1) {
            std::vector<PlotSeries> raw, rescaled;
            ScalingLaw law = ScalingLaw::area;
            if (sbar_series.entries.size() >= 3) law = fit_scaling(sbar_series).law;
            for (const auto& [lsize, series] : curves) {
                PlotSeries p{"L=" + format_double(lsize), series.omega0, series.value};
                raw.push_back(p);
                const double f = law_value(law, lsize, ana_dim);
                for (double& y : p.y) y /= f;
                p.label += " /F(L)";
                rescaled.push_back(std::move(p));
            }
            const fs::path raw_svg = out_dir / "sbar_raw.svg";
            const fs::path resc_svg = out_dir / "sbar_rescaled.svg";
            write_svg_plot(raw_svg, cfg.model + ": smoothed structure factor", "omega0", "sbar",
                           raw);
            write_svg_plot(resc_svg,
                           cfg.model + ": rescaled by " + std::string(law_name(law)) + " law",
                           "omega0", "sbar / F(L)", rescaled);
            record.files["plot_raw"] = raw_svg.string();
            record.files["plot_rescaled"] = resc_svg.string();
        }

        record.timings_s["total"] = seconds_since(t_start);
        record.complete = true;
        write_text_file(out_dir / "run_record.json", record.to_json().dump(2) + "\n");
        return record;
    } catch (...) {
        record.timings_s["total"] = seconds_since(t_start);
        record.complete = false;
        write_text_file(out_dir / "run_record.json", record.to_json().dump(2) + "\n");
        throw;
    }
}

} // namespace fermiscale

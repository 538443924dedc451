#include "eemdkit/app/commands.hpp"

#include "eemdkit/app/reports.hpp"
#include "eemdkit/decomposition_io.hpp"
#include "eemdkit/eemd.hpp"
#include "eemdkit/error.hpp"
#include "eemdkit/hilbert.hpp"
#include "eemdkit/series.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>
#include <openssl/evp.h>
#include <openssl/opensslv.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <memory>
#include <set>

#ifndef EEMDKIT_VERSION
#define EEMDKIT_VERSION "0.0.0"
#endif

namespace eemdkit::app {

namespace {

constexpr const char* kModule = "cli-harness";
constexpr const char* kManifestFormat = "eemdkit.manifest/1";

std::string join(const std::vector<std::string>& items, const char* sep = ", ") {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i)
        out += (i ? sep : "") + items[i];
    return out;
}

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw ValidationError(kModule, "cannot create output directory '" + dir.string() + "'");
}

bool same_file(const fs::path& a, const fs::path& b) {
    std::error_code ec;
    if (fs::exists(a, ec) && fs::exists(b, ec))
        return fs::equivalent(a, b, ec);
    return fs::weakly_canonical(a, ec) == fs::weakly_canonical(b, ec);
}

/// Refuses to let any planned output overwrite an input.
void guard_inputs(const std::vector<fs::path>& outputs, const std::vector<fs::path>& inputs) {
    for (const auto& o : outputs)
        for (const auto& i : inputs)
            if (same_file(o, i))
                throw ValidationError(kModule, "output '" + o.string() + "' would overwrite input '" + i.string() + "'");
}

Decomposition decompose(const TimeSeries& s, Method method, const EemdConfig& cfg) {
    spdlog::info("decomposing '{}' ({} samples, {})", s.name, s.size(), to_string(method));
    return method == Method::emd ? emd(s, cfg.sift) : eemd(s, cfg);
}

TimeSeries apply_transform(const TimeSeries& s, Transform t) {
    return t == Transform::log ? log_transform(s) : s;
}

/// Decomposition stems found in `dir`, sorted by name.
std::vector<std::string> discover_decompositions(const fs::path& dir) {
    if (!fs::is_directory(dir))
        throw ValidationError(kModule, "decomposition directory '" + dir.string() + "' does not exist");
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() != ".json")
            continue;
        const fs::path stem = entry.path().parent_path() / entry.path().stem();
        if (!fs::exists(with_suffix(stem, ".csv")))
            continue;
        std::ifstream in(entry.path());
        const auto j = nlohmann::ordered_json::parse(in, nullptr, false);
        if (j.is_object() && j.value("format", "") == "eemdkit.decomposition/1")
            names.push_back(entry.path().stem().string());
    }
    std::sort(names.begin(), names.end());
    if (names.empty())
        throw ValidationError(kModule, "no decompositions found in '" + dir.string() + "'");
    return names;
}

std::vector<std::string> resolve_columns(const fs::path& from, const std::vector<std::string>& columns) {
    return columns.empty() ? discover_decompositions(from) : columns;
}

std::vector<NamedDecomposition> decompose_panel(const AlignedPanel& panel, const std::vector<std::string>& names,
                                                Method method, const EemdConfig& cfg) {
    std::vector<NamedDecomposition> out;
    for (const auto& name : names)
        out.emplace_back(name, decompose(panel.at(name), method, cfg));
    return out;
}

void harmonize(std::vector<NamedDecomposition>& decs, const std::vector<std::string>& names,
               const AlignedPanel& panel, Method method, const EemdConfig& cfg) {
    for (const auto& name : harmonize_imf_counts(decs, names, panel, method, cfg))
        spdlog::info("'{}' re-decomposed to {} IMFs to match the panel", name,
                     std::find_if(decs.begin(), decs.end(), [&](const auto& d) { return d.first == name; })
                         ->second.imfs.size());
}

std::vector<std::string> regression_variables(const RegressionSpec& spec) {
    std::vector<std::string> v{spec.dependent};
    v.insert(v.end(), spec.regressors.begin(), spec.regressors.end());
    return v;
}

std::vector<fs::path> emit_features(const fs::path& out, const std::string& name, const Decomposition& d,
                                    std::span<const double> original, HorizonRule rule) {
    const auto rows = imf_features(d, original, rule);
    const fs::path stem = out / (name + "_features");
    write_features(stem, name, rows, rule);
    return {with_suffix(stem, ".csv"), with_suffix(stem, ".json")};
}

std::vector<fs::path> emit_plotdata(const fs::path& out, const std::string& name, const Decomposition& d) {
    std::vector<fs::path> written;
    const fs::path sift = out / (name + "_sift.csv");
    if (write_sift_plot(sift, d))
        written.push_back(sift);
    else
        spdlog::warn("'{}' has no oscillation; sifting plot data skipped", name);
    const fs::path comp = out / (name + "_components.csv");
    write_component_plot(comp, d);
    written.push_back(comp);
    return written;
}

} // namespace

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError(kModule, "cannot read '" + path.string() + "' for hashing");
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        throw NumericalError(kModule, "SHA-256 initialisation failed");
    char buf[1 << 15];
    while (in) {
        in.read(buf, sizeof buf);
        if (in.gcount() > 0)
            EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

std::string version_string() {
    return std::string("eemdkit ") + EEMDKIT_VERSION;
}

std::vector<fs::path> run_decompose(const DecomposeArgs& args) {
    args.eemd.validate();
    const auto columns = args.columns.empty() ? csv_value_columns(args.input) : args.columns;
    const auto series = ingest_csv_columns(args.input, columns);

    std::vector<fs::path> planned;
    for (const auto& s : series) {
        planned.push_back(args.out / (s.name + ".csv"));
        planned.push_back(args.out / (s.name + ".json"));
    }
    guard_inputs(planned, {args.input});
    make_dir(args.out);

    std::vector<fs::path> stems;
    for (const auto& raw : series) {
        const auto d = decompose(apply_transform(raw, args.transform), args.method, args.eemd);
        const fs::path stem = args.out / raw.name;
        write_decomposition(stem, d, {{"transform", to_string(args.transform)}});
        stems.push_back(stem);
    }
    return stems;
}

std::vector<fs::path> run_features(const FeaturesArgs& args) {
    const fs::path out = args.out.empty() ? args.from : args.out;
    make_dir(out);
    std::vector<fs::path> written;
    for (const auto& name : resolve_columns(args.from, args.columns)) {
        const auto d = read_decomposition(args.from / name);
        const auto original = d.reconstruct();
        auto files = emit_features(out, name, d, original, args.horizon);
        written.insert(written.end(), files.begin(), files.end());
    }
    return written;
}

std::vector<fs::path> run_regress(const RegressArgs& args) {
    args.spec.validate();
    if (args.from.has_value() == args.input.has_value())
        throw ValidationError(kModule, "regress needs exactly one of --from or --input");
    if (args.from && args.transform)
        throw ValidationError(kModule, "--transform applies to --input only; stored decompositions are already transformed");

    const auto names = regression_variables(args.spec);
    std::vector<NamedDecomposition> panel;
    std::string transform = "levels";
    if (args.from) {
        for (const auto& name : names)
            panel.emplace_back(name, read_decomposition(*args.from / name));
        const auto side = read_sidecar(*args.from / args.spec.dependent);
        transform = side.value("transform", "levels");
    } else {
        args.eemd.validate();
        const auto series = ingest_csv_columns(*args.input, names);
        const Transform t = args.transform.value_or(Transform::levels);
        transform = to_string(t);
        std::vector<TimeSeries> prepared;
        for (const auto& s : series)
            prepared.push_back(apply_transform(s, t));
        AlignedPanel aligned = align(prepared);
        panel = decompose_panel(aligned, names, args.method, args.eemd);
        harmonize(panel, names, aligned, args.method, args.eemd);
    }

    const auto fits = multiscale_fit(panel, args.spec, args.taxonomy);
    std::vector<fs::path> inputs;
    if (args.input)
        inputs.push_back(*args.input);
    guard_inputs({args.out / "regression.json", args.out / "regression.csv", args.out / "classification.csv"}, inputs);
    make_dir(args.out);
    return write_regression(args.out, {args.spec, args.taxonomy, transform}, fits);
}

std::vector<fs::path> run_hilbert(const SeriesViewArgs& args) {
    const fs::path out = args.out.empty() ? args.from : args.out;
    make_dir(out);
    std::vector<fs::path> written;
    for (const auto& name : resolve_columns(args.from, args.columns)) {
        const auto d = read_decomposition(args.from / name);
        const fs::path path = out / (name + "_hilbert.csv");
        write_hilbert(path, d);
        written.push_back(path);
    }
    return written;
}

std::vector<fs::path> run_plotdata(const SeriesViewArgs& args) {
    const fs::path out = args.out.empty() ? args.from : args.out;
    make_dir(out);
    std::vector<fs::path> written;
    for (const auto& name : resolve_columns(args.from, args.columns)) {
        auto files = emit_plotdata(out, name, read_decomposition(args.from / name));
        written.insert(written.end(), files.begin(), files.end());
    }
    return written;
}

namespace {

struct PipelineState {
    fs::path dir;
    std::vector<std::string> stages;
    std::vector<fs::path> files;
};

void write_manifest(const PipelineState& st, const RunConfig& cfg, const Error* error,
                    const std::string& other_error) {
    ordered_json m;
    m["format"] = kManifestFormat;
    m["versions"] = {
        {"eemdkit", EEMDKIT_VERSION},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"boost", std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) + "." +
                      std::to_string(BOOST_VERSION % 100)},
        {"fft", fft_backend_version()},
    };
    m["seed"] = cfg.eemd.seed;
    m["seed_source"] = cfg.seed_defaulted ? "default" : "config";
    ordered_json conf = ordered_json::object();
    for (const auto& [k, v] : cfg.resolved)
        conf[k] = v;
    m["config"] = std::move(conf);
    m["stages_completed"] = st.stages;

    std::vector<std::pair<std::string, std::string>> hashes;
    for (const auto& f : st.files)
        hashes.emplace_back(fs::relative(f, st.dir).generic_string(), sha256_file(f));
    std::sort(hashes.begin(), hashes.end());
    ordered_json files = ordered_json::object();
    for (const auto& [name, digest] : hashes)
        files[name] = {{"sha256", digest}};
    m["files"] = std::move(files);

    if (error) {
        m["status"] = "failed";
        m["error"] = {{"kind", error->kind() == ErrorKind::validation ? "validation" : "numerical"},
                      {"module", error->module()},
                      {"message", error->what()}};
    } else if (!other_error.empty()) {
        m["status"] = "failed";
        m["error"] = {{"kind", "internal"}, {"message", other_error}};
    } else {
        m["status"] = "ok";
    }
    std::ofstream out(st.dir / "manifest.json", std::ios::binary);
    if (!out)
        throw ValidationError(kModule, "cannot write manifest in '" + st.dir.string() + "'");
    out << m.dump(2) << '\n';
}

TimeSeries series_or_constant(const AlignedPanel& panel, const ScalarOrColumn& v, const std::string& what) {
    if (v.constant)
        return {};
    if (!panel.contains(v.column))
        throw ValidationError(kModule, what + " column '" + v.column + "' is not in the panel");
    return panel.at(v.column);
}

double value_at(const ScalarOrColumn& v, const TimeSeries& s, std::size_t t) {
    return v.constant ? *v.constant : s.values[t];
}

void stage_prepare(const RunConfig& cfg, PipelineState& st, AlignedPanel& panel, std::vector<std::string>& analysis) {
    // ingest: every requested column must live in exactly one input file.
    std::vector<std::string> aux;
    if (cfg.forward)
        for (const auto* p : {&cfg.forward->rate, &cfg.forward->storage, &cfg.forward->convenience})
            if (!p->constant)
                aux.push_back(p->column);

    std::vector<std::pair<fs::path, std::vector<std::string>>> file_columns;
    std::set<std::string> seen;
    for (const auto& f : cfg.input_files) {
        auto cols = csv_value_columns(f);
        for (const auto& c : cols)
            if (!seen.insert(c).second)
                throw ValidationError(kModule, "column '" + c + "' appears in more than one input file");
        file_columns.emplace_back(f, std::move(cols));
    }
    if (cfg.columns.empty()) {
        for (const auto& [f, cols] : file_columns)
            for (const auto& c : cols)
                if (std::find(aux.begin(), aux.end(), c) == aux.end())
                    analysis.push_back(c);
    } else {
        analysis = cfg.columns;
    }
    std::vector<std::string> wanted = analysis;
    for (const auto& a : aux)
        if (std::find(wanted.begin(), wanted.end(), a) == wanted.end())
            wanted.push_back(a);
    for (const auto& w : wanted)
        if (!seen.count(w))
            throw ValidationError(kModule, "column '" + w + "' not found in any input file");

    std::vector<TimeSeries> series;
    for (const auto& [f, cols] : file_columns) {
        std::vector<std::string> take;
        for (const auto& c : cols)
            if (std::find(wanted.begin(), wanted.end(), c) != wanted.end())
                take.push_back(c);
        if (take.empty())
            continue;
        auto part = ingest_csv_columns(f, take);
        series.insert(series.end(), part.begin(), part.end());
    }
    // Keep the caller's column order.
    std::vector<TimeSeries> ordered;
    for (const auto& w : wanted)
        for (const auto& s : series)
            if (s.name == w)
                ordered.push_back(s);
    st.stages.push_back("ingest");

    if (ordered.size() == 1) {
        ordered.front().validate();
        panel.dates = ordered.front().dates;
        panel.series = ordered;
    } else {
        panel = align(ordered);
    }
    st.stages.push_back("align");
    spdlog::info("aligned panel: {} series x {} dates", panel.series.size(), panel.dates.size());

    if (cfg.deflate) {
        const auto& spec = *cfg.deflate;
        TimeSeries index = ingest_csv(spec.index_file, spec.index_column);
        if (index.dates != panel.dates)
            index = upsample_low_to_high(index, panel.dates);
        for (auto& s : panel.series) {
            if (std::find(spec.columns.begin(), spec.columns.end(), s.name) == spec.columns.end())
                continue;
            s = deflate_to_real(s, index);
        }
        for (const auto& c : spec.columns)
            if (!panel.contains(c))
                throw ValidationError(kModule, "deflate column '" + c + "' is not in the panel");
        st.stages.push_back("deflate");
    }

    if (cfg.forward) {
        const auto& fw = *cfg.forward;
        const TimeSeries rate = series_or_constant(panel, fw.rate, "forward.rate");
        const TimeSeries storage = series_or_constant(panel, fw.storage, "forward.storage");
        const TimeSeries conv = series_or_constant(panel, fw.convenience, "forward.convenience");
        for (const auto& c : fw.columns)
            if (!panel.contains(c))
                throw ValidationError(kModule, "forward column '" + c + "' is not in the panel");
        for (auto& s : panel.series) {
            if (std::find(fw.columns.begin(), fw.columns.end(), s.name) == fw.columns.end())
                continue;
            for (std::size_t t = 0; t < s.size(); ++t)
                s.values[t] = forward_price(
                    {s.values[t], value_at(fw.rate, rate, t), value_at(fw.storage, storage, t), value_at(fw.convenience, conv, t)});
        }
        st.stages.push_back("forward");
    }

    // Auxiliary columns only feed the forward relation.
    std::vector<TimeSeries> kept;
    for (const auto& s : panel.series)
        if (std::find(analysis.begin(), analysis.end(), s.name) != analysis.end())
            kept.push_back(s);
    panel.series = std::move(kept);

    if (cfg.transform == Transform::log) {
        for (auto& s : panel.series)
            s = log_transform(s);
        st.stages.push_back("transform");
    }

    const fs::path prepared = st.dir / "prepared_panel.csv";
    write_csv(prepared, panel.series);
    st.files.push_back(prepared);
}

} // namespace

fs::path run_pipeline(const fs::path& config_path, const PipelineOverrides& overrides) {
    return run_pipeline(load_run_config(config_path), overrides);
}

fs::path run_pipeline(RunConfig cfg, const PipelineOverrides& overrides) {
    if (overrides.seed) {
        cfg.eemd.seed = *overrides.seed;
        cfg.seed_defaulted = false;
        cfg.resolved["seed"] = std::to_string(*overrides.seed);
    }
    if (overrides.threads)
        cfg.eemd.threads = *overrides.threads;
    if (overrides.out)
        cfg.output_dir = *overrides.out;
    if (cfg.output_dir.empty())
        throw ValidationError(kModule, "no output directory: set output.dir or pass --out");
    if (cfg.regression && cfg.emit.regression)
        for (const auto& v : regression_variables(*cfg.regression))
            if (!cfg.columns.empty() && std::find(cfg.columns.begin(), cfg.columns.end(), v) == cfg.columns.end())
                throw ValidationError(kModule, "regression variable '" + v + "' is not listed in input.columns");

    std::vector<fs::path> inputs = cfg.input_files;
    if (cfg.deflate)
        inputs.push_back(cfg.deflate->index_file);
    for (const auto& i : inputs)
        if (same_file(cfg.output_dir, i) || same_file(cfg.output_dir, i.parent_path()))
            throw ValidationError(kModule, "output directory '" + cfg.output_dir.string() +
                                               "' contains input files; choose a separate run directory");
    make_dir(cfg.output_dir);

    PipelineState st;
    st.dir = cfg.output_dir;
    try {
        AlignedPanel panel;
        std::vector<std::string> analysis;
        stage_prepare(cfg, st, panel, analysis);

        const fs::path dec_dir = st.dir / "decomposition";
        make_dir(dec_dir);
        std::vector<NamedDecomposition> decs = decompose_panel(panel, analysis, cfg.method, cfg.eemd);
        if (cfg.regression && cfg.emit.regression)
            harmonize(decs, regression_variables(*cfg.regression), panel, cfg.method, cfg.eemd);
        for (const auto& [name, d] : decs) {
            write_decomposition(dec_dir / name, d, {{"transform", to_string(cfg.transform)}});
            st.files.push_back(dec_dir / (name + ".csv"));
            st.files.push_back(dec_dir / (name + ".json"));
        }
        st.stages.push_back("decompose");

        if (cfg.emit.features) {
            const fs::path dir = st.dir / "features";
            make_dir(dir);
            for (const auto& [name, d] : decs) {
                auto files = emit_features(dir, name, d, panel.at(name).values, cfg.horizon);
                st.files.insert(st.files.end(), files.begin(), files.end());
            }
            st.stages.push_back("features");
        }

        if (cfg.regression && cfg.emit.regression) {
            const fs::path dir = st.dir / "regression";
            make_dir(dir);
            const auto fits = multiscale_fit(decs, *cfg.regression, cfg.taxonomy);
            auto files = write_regression(dir, {*cfg.regression, cfg.taxonomy, to_string(cfg.transform)}, fits);
            st.files.insert(st.files.end(), files.begin(), files.end());
            st.stages.push_back("regress");
        }

        if (cfg.emit.hilbert) {
            const fs::path dir = st.dir / "hilbert";
            make_dir(dir);
            for (const auto& [name, d] : decs) {
                write_hilbert(dir / (name + "_hilbert.csv"), d);
                st.files.push_back(dir / (name + "_hilbert.csv"));
            }
            st.stages.push_back("hilbert");
        }

        if (cfg.emit.plotdata) {
            const fs::path dir = st.dir / "plotdata";
            make_dir(dir);
            for (const auto& [name, d] : decs) {
                auto files = emit_plotdata(dir, name, d);
                st.files.insert(st.files.end(), files.begin(), files.end());
            }
            st.stages.push_back("plotdata");
        }
    } catch (const Error& e) {
        spdlog::error("pipeline stopped after [{}]: {}", join(st.stages), e.what());
        write_manifest(st, cfg, &e, {});
        throw;
    } catch (const std::exception& e) {
        spdlog::error("pipeline stopped after [{}]: {}", join(st.stages), e.what());
        write_manifest(st, cfg, nullptr, e.what());
        throw;
    }
    write_manifest(st, cfg, nullptr, {});
    return st.dir / "manifest.json";
}

} // namespace eemdkit::app

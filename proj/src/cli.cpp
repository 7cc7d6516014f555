#include "treespace/cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <ostream>

#include "treespace/newick.hpp"

namespace treespace::cli {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

json header(const char* command) { return {{"schema", 1}, {"command", command}}; }

const char* algo_name(Algo a) {
    switch (a) {
        case Algo::Sturm: return "sturm";
        case Algo::Orthant: return "orthant";
        case Algo::Hybrid: return "hybrid";
    }
    return "";
}

void emit_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

void write_certificate_text(std::ostream& out, const OptimalityCertificate& c) {
    out << "certificate " << (c.optimal() ? "optimal" : "descent") << '\n';
    out << "grad_norm " << format_number(c.grad_norm) << '\n';
    for (std::size_t i = 0; i < c.chain.size(); ++i) {
        out << "chain " << i + 1 << " f_star " << format_number(c.chain[i].f_star);
        for (const auto& s : c.chain[i].face) out << ' ' << s.to_string();
        out << '\n';
    }
    if (!c.optimal()) {
        for (std::size_t i = 0; i < c.direction.splits.size(); ++i)
            if (c.direction.interior[i] != 0.0)
                out << "direction " << c.direction.splits[i].to_string() << ' '
                    << format_number(c.direction.interior[i]) << '\n';
        out << "step " << format_number(c.step) << '\n';
    }
}

void write_trace(const CliConfig& cfg, const std::vector<TraceRow>& trace) {
    if (cfg.trace_path.empty()) return;
    std::ofstream f(cfg.trace_path);
    if (!f) throw std::runtime_error("cannot write trace file " + cfg.trace_path);
    write_trace_csv(f, trace);
}

// Reads through the command's inputs and reports parser warnings on err.
class Reader {
public:
    explicit Reader(std::ostream& e) : err(e) {}
    std::vector<Tree> trees(const std::string& path) const { return flush(read_trees(path, &w)); }
    Tree single(const std::string& path) const { return flush(read_single_tree(path, &w)); }

private:
    std::ostream& err;
    mutable std::vector<std::string> w;
    template <class T>
    T flush(T v) const {
        for (const auto& s : w) err << "warning: " << s << '\n';
        w.clear();
        return v;
    }
};

}  // namespace

void CliConfig::validate() const {
    newton.validate();
    if (!(tol >= 0.0)) throw std::invalid_argument("--tol must be nonnegative");
    if (max_steps == 0) throw std::invalid_argument("--steps must be positive");
    if (trace_every == 0) throw std::invalid_argument("--trace-every must be positive");
    if (command == Command::Geodesic && !(lambda >= 0.0 && lambda <= 1.0))
        throw std::invalid_argument("--lambda must lie in [0,1]");
    if (!trace_path.empty() && command == Command::Mean && algo == Algo::Orthant)
        throw std::invalid_argument("--trace records the proximal stage; use --algo sturm or hybrid");
    if (!orthant_path.empty() && algo != Algo::Orthant) throw std::invalid_argument("--orthant needs --algo orthant");
}

ProximalSchedule CliConfig::schedule() const {
    ProximalSchedule s;
    s.order = random_order ? ProximalSchedule::Order::UniformRandom : ProximalSchedule::Order::Cyclic;
    s.seed = seed;
    s.max_steps = max_steps;
    s.tolerance = tol;
    if (!trace_path.empty()) s.trace_every = trace_every;
    return s;
}

std::vector<Tree> read_trees(const std::string& path, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<Tree> trees;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::vector<std::string> local;
        try {
            trees.push_back(parse_newick(t, &local));
        } catch (const NewickError& e) {
            throw NewickError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (trees.back().leaf_count() != trees.front().leaf_count())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": leaf count differs from the first tree");
        if (warnings)
            for (const auto& w : local) warnings->push_back(path + ":" + std::to_string(lineno) + ": " + w);
    }
    if (trees.empty()) throw std::runtime_error(path + ": no trees");
    return trees;
}

Tree read_single_tree(const std::string& path, std::vector<std::string>* warnings) {
    auto trees = read_trees(path, warnings);
    if (trees.size() != 1) throw std::runtime_error(path + ": expected exactly one tree");
    return std::move(trees.front());
}

int cmd_dist(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    const Reader read{err};
    const Tree a = read.single(cfg.inputs.at(0)), b = read.single(cfg.inputs.at(1));
    if (a.leaf_count() != b.leaf_count()) throw std::runtime_error("trees have different leaf counts");
    const Geodesic g = compute_geodesic(a, b);
    if (cfg.format == Format::Json) {
        json j = header("dist");
        j.update(geodesic_to_json(g));
        emit_json(out, j);
        return kOk;
    }
    out << "distance " << format_number(g.length) << '\n';
    out << "support " << g.support.size() << '\n';
    for (std::size_t i = 0; i < g.support.size(); ++i) {
        out << "pair " << i + 1 << " A";
        for (const auto& s : g.support.pairs[i].a) out << ' ' << s.to_string();
        out << " B";
        for (const auto& s : g.support.pairs[i].b) out << ' ' << s.to_string();
        out << '\n';
    }
    out << "common " << g.common.size() << '\n';
    return kOk;
}

int cmd_geodesic(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    const Reader read{err};
    const Tree a = read.single(cfg.inputs.at(0)), b = read.single(cfg.inputs.at(1));
    if (a.leaf_count() != b.leaf_count()) throw std::runtime_error("trees have different leaf counts");
    const Geodesic g = compute_geodesic(a, b);
    const Tree p = point_at(g, cfg.lambda);
    if (cfg.format == Format::Json) {
        json j = header("geodesic");
        j["lambda"] = cfg.lambda;
        j["leg"] = leg_index(g, cfg.lambda);
        j["distance"] = g.length;
        j["tree"] = write_newick(p);
        emit_json(out, j);
    } else {
        out << write_newick(p) << '\n';
    }
    return kOk;
}

int cmd_mean(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    const Reader read{err};
    const FrechetProblem prob(read.trees(cfg.inputs.at(0)));
    json j = header("mean");
    j["algo"] = algo_name(cfg.algo);
    j["n"] = prob.n();
    Tree x;
    double value = 0.0;
    std::optional<OptimalityCertificate> cert;

    switch (cfg.algo) {
        case Algo::Sturm: {
            const GlobalResult r = global_mean(prob, cfg.schedule());
            write_trace(cfg, r.trace);
            x = r.x;
            value = frechet_value(prob, x);
            j["steps"] = r.steps;
            j["converged"] = r.converged;
            break;
        }
        case Algo::Orthant: {
            const Orthant o = cfg.orthant_path.empty() ? Orthant::of(prob.data().front())
                                                       : Orthant::of(read.single(cfg.orthant_path));
            if (o.leaf_count != prob.leaf_count()) throw std::runtime_error("orthant tree has a different leaf count");
            OrthantResult r = minimize_in_closed_orthant(prob, o, cfg.newton);
            x = r.x;
            value = r.value;
            j["newton_iters"] = r.iters;
            j["converged"] = r.converged;
            cert = std::move(r.certificate);
            break;
        }
        case Algo::Hybrid: {
            HybridResult r = hybrid_mean(prob, cfg.schedule(), cfg.newton);
            write_trace(cfg, r.sturm_trace);
            x = r.x;
            value = r.value;
            j["sturm_steps"] = r.sturm_steps;
            j["sturm_F"] = r.sturm_value;
            j["newton_iters"] = r.newton_iters;
            j["rounds"] = r.rounds;
            cert = std::move(r.certificate);
            break;
        }
    }

    const int code = cert && !cert->optimal() ? kNotOptimal : kOk;
    if (cfg.format == Format::Json) {
        j["tree"] = write_newick(x);
        j["F"] = value;
        if (cert) j["certificate"] = cert->to_json();
        emit_json(out, j);
        return code;
    }
    out << write_newick(x) << '\n';
    out << "F " << format_number(value) << '\n';
    for (const char* key : {"steps", "sturm_steps", "newton_iters", "rounds"})
        if (j.contains(key)) out << key << ' ' << j[key].dump() << '\n';
    if (cert) write_certificate_text(out, *cert);
    return code;
}

int cmd_verify(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    const Reader read{err};
    const FrechetProblem prob(read.trees(cfg.inputs.at(0)));
    const Tree candidate = read.single(cfg.inputs.at(1));
    if (candidate.leaf_count() != prob.leaf_count()) throw std::runtime_error("candidate has a different leaf count");
    const OptimalityCertificate cert = certify_all_orthants(prob, candidate, cfg.newton);
    const double value = frechet_value(prob, candidate);
    if (cfg.format == Format::Json) {
        json j = header("verify");
        j["tree"] = write_newick(candidate);
        j["F"] = value;
        j["certificate"] = cert.to_json();
        emit_json(out, j);
    } else {
        out << "F " << format_number(value) << '\n';
        write_certificate_text(out, cert);
    }
    return cert.optimal() ? kOk : kNotOptimal;
}

int cmd_canon(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    const Reader read{err};
    const auto trees = read.trees(cfg.inputs.at(0));
    if (cfg.format == Format::Json) {
        json j = header("canon");
        j["trees"] = json::array();
        for (const auto& t : trees) j["trees"].push_back(write_newick(t));
        emit_json(out, j);
    } else {
        for (const auto& t : trees) out << write_newick(t) << '\n';
    }
    return kOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CliConfig cfg;
    CLI::App app{"Geodesics and Frechet means in BHV tree space", args.empty() ? "treespace" : args[0]};
    app.require_subcommand(1);
    app.fallthrough();

    std::string format = "text", algo = "hybrid", order = "cyclic";
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
    app.add_option("--tol", cfg.tol, "Proximal stopping tolerance on iterate movement");
    app.add_option("--steps", cfg.max_steps, "Maximum proximal steps");
    app.add_option("--order", order, "Proximal index order")->check(CLI::IsMember({"cyclic", "random"}));
    app.add_option("--seed", cfg.seed, "Seed for --order random");
    app.add_option("--delta", cfg.newton.delta, "Gradient tolerance");
    app.add_option("--eps", cfg.newton.epsilon, "Edge removal threshold");
    app.add_option("--c1", cfg.newton.c1, "Sufficient decrease constant");
    app.add_option("--c2", cfg.newton.c2, "Curvature constant");
    app.add_option("--max-iters", cfg.newton.max_iters, "Newton iteration cap per orthant");
    app.add_option("--trace", cfg.trace_path, "CSV trace of the proximal stage");
    app.add_option("--trace-every", cfg.trace_every, "Trace sampling interval");

    auto* dist = app.add_subcommand("dist", "Geodesic distance between two trees");
    auto* geo = app.add_subcommand("geodesic", "Point on the geodesic between two trees");
    auto* mean = app.add_subcommand("mean", "Frechet mean of a tree file");
    auto* verify = app.add_subcommand("verify", "Certify a candidate mean");
    auto* canon = app.add_subcommand("canon", "Rewrite trees in canonical Newick");

    std::string p1, p2;
    for (auto* sub : {dist, geo, verify}) {
        sub->add_option("first", p1)->required();
        sub->add_option("second", p2)->required();
    }
    mean->add_option("trees", p1)->required();
    canon->add_option("trees", p1)->required();
    geo->add_option("--lambda", cfg.lambda, "Position in [0,1]")->required();
    mean->add_option("--algo", algo, "sturm, orthant or hybrid")->check(CLI::IsMember({"sturm", "orthant", "hybrid"}));
    mean->add_option("--orthant", cfg.orthant_path, "Tree whose topology fixes the orthant (--algo orthant)");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        if (!rev.empty()) rev.pop_back();
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kError;
    }

    cfg.format = format == "json" ? Format::Json : Format::Text;
    cfg.algo = algo == "sturm" ? Algo::Sturm : algo == "orthant" ? Algo::Orthant : Algo::Hybrid;
    cfg.random_order = order == "random";
    cfg.inputs = {p1};
    if (!p2.empty()) cfg.inputs.push_back(p2);
    if (*dist) cfg.command = Command::Dist;
    else if (*geo) cfg.command = Command::Geodesic;
    else if (*mean) cfg.command = Command::Mean;
    else if (*verify) cfg.command = Command::Verify;
    else cfg.command = Command::Canon;

    try {
        cfg.validate();
        switch (cfg.command) {
            case Command::Dist: return cmd_dist(cfg, out, err);
            case Command::Geodesic: return cmd_geodesic(cfg, out, err);
            case Command::Mean: return cmd_mean(cfg, out, err);
            case Command::Verify: return cmd_verify(cfg, out, err);
            case Command::Canon: return cmd_canon(cfg, out, err);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
    }
    return kError;
}

}  // namespace treespace::cli

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lmt/bounds.hpp"
#include "lmt/depth.hpp"
#include "lmt/encodings.hpp"
#include "lmt/parse.hpp"
#include "lmt/reduce.hpp"
#include "lmt/refs.hpp"
#include "lmt/reorder.hpp"
#include "lmt/typecheck.hpp"

using namespace lmt;

namespace {

constexpr int kOk = 0;
constexpr int kRejected = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    if (path == "-") {
        std::stringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool is_nu_file(const std::string& path) {
    auto ends = [&](const std::string& suf) {
        return path.size() >= suf.size() && path.compare(path.size() - suf.size(), suf.size(), suf) == 0;
    };
    return ends(".lmtnu") || ends(".lmtν");
}

SourceFile load(const std::string& path) {
    try {
        return parse_source(slurp(path));
    } catch (const ParseError& e) {
        throw UsageError(path + ":" + e.what());
    }
}

std::uint64_t default_seed() {
    if (const char* s = std::getenv("LMT_SEED")) return std::strtoull(s, nullptr, 10);
    return 0;
}

std::ostream& out_stream(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path, std::ios::binary);
    if (!file) throw UsageError("cannot write " + path);
    return file;
}

// -- subcommands ---------------------------------------------------------------

int cmd_parse(const std::string& path, bool addresses) {
    SourceFile f = load(path);
    std::cout << print_source(f);
    if (addresses) {
        for_each_occurrence(f.program, [&](const Address& w, const Node& n) {
            std::cout << w.to_string() << "\t" << kind_name(n.kind) << "\tdepth " << depth_of(f.program, w, f.regions)
                      << "\n";
        });
    }
    return kOk;
}

int cmd_depthcheck(const std::string& path, bool quiet) {
    SourceFile f = load(path);
    auto res = check_wf(f.program, f.regions, {}, 0, f.locations);
    if (!res) {
        std::cout << explain(*res.error) << "\n";
        return kRejected;
    }
    if (!quiet) std::cout << res.derivation->to_text(f.regions);
    // Location stores sit at the depth of their region, which the translation makes explicit.
    Program q = f.locations.empty() ? f.program : refs::translate(refs::NuState{f.program, f.locations});
    std::cout << "well-formed, depth " << depth(q, f.regions) << "\n";
    return kOk;
}

int cmd_typecheck(const std::string& path, bool derivation, unsigned delta) {
    SourceFile f = load(path);
    auto res = typecheck(f.program, f.regions, {}, delta, f.locations);
    if (!res) {
        std::cout << explain(*res.error) << "\n";
        return kRejected;
    }
    if (derivation) std::cout << res.derivation->to_text(f.regions);
    std::cout << to_string(res.type()) << "\n";
    return kOk;
}

struct EvalFlags {
    std::string relation = "cbv";
    std::string strategy = "cbv";
    std::uint64_t seed = 0;
    std::size_t fuel = RunOptions{}.fuel;
    std::string trace;
    bool verbose = false;
    bool under_binders = false;
};

int eval_nu(const std::string& path, const EvalFlags& fl) {
    SourceFile f = load(path);
    Relation rel = fl.under_binders ? Relation::cbv_ext : parse_relation(fl.relation);
    if (rel != Relation::cbv && rel != Relation::cbv_ext) throw UsageError("reference programs run under cbv or cbv-ext");
    Strategy st{parse_strategy(fl.strategy), fl.seed};
    auto r = refs::run(refs::NuState{f.program, f.locations}, rel, st, fl.fuel);
    if (fl.verbose) {
        for (std::size_t i = 0; i < r.steps.size(); ++i)
            std::cout << i + 1 << "\t" << rule_name(r.steps[i].redex.rule) << "@" << r.steps[i].redex.address.to_string()
                      << "\t" << print(r.steps[i].after.program) << "\n";
    }
    std::cout << "steps: " << r.steps.size() << "\n";
    std::cout << "final: " << print(r.final_state.program) << "\n";
    for (const auto& x : r.unassigned_reads) std::cout << "blocked read of unassigned location " << x << "\n";
    if (!r.halted) {
        std::cout << "fuel exhausted\n";
        return kRejected;
    }
    return kOk;
}

int cmd_eval(const std::string& path, const EvalFlags& fl) {
    if (is_nu_file(path)) return eval_nu(path, fl);
    SourceFile f = load(path);
    Relation rel = parse_relation(fl.relation);
    Strategy st{parse_strategy(fl.strategy), fl.seed};
    RunOptions opts;
    opts.fuel = fl.fuel;
    RunResult r;
    try {
        r = run(f.program, rel, f.regions, st, opts);
    } catch (const CbvSyntaxError& e) {
        std::cout << e.what() << "\n";
        return kRejected;
    }
    if (fl.verbose) {
        for (const auto& s : r.trace.steps)
            std::cout << s.index << "\t" << rule_name(s.redex.rule) << "@" << s.redex.address.to_string() << "\td"
                      << s.redex.depth << "\t" << print(s.after) << "\n";
    }
    if (!fl.trace.empty()) {
        std::ofstream file;
        write_trace(out_stream(fl.trace, file), r.trace);
    }
    std::cout << "steps: " << r.trace.steps.size() << "\n";
    std::cout << "final: " << print(r.final_program) << "\n";
    if (!r.halted) {
        std::cout << "fuel exhausted\n";
        return kRejected;
    }
    auto stuck = classify_stuck(r.final_program);
    for (const auto& t : stuck.threads) {
        if (t.shape == ThreadShape::blocked_read)
            std::cout << "blocked read on #" << t.region << ": " << print(t.thread) << "\n";
        else if (t.shape == ThreadShape::violation)
            std::cout << "stuck: " << print(t.thread) << " (" << t.reason << ")\n";
    }
    return kOk;
}

int cmd_reorder(const std::string& path, const std::string& output) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path);
    Trace t = read_trace(in);
    ReorderResult r;
    try {
        r = reorder_shallow_first(t);
    } catch (const NoSwapFound& e) {
        std::cerr << e.what() << "\n";
        return kRejected;
    }
    std::ofstream file;
    write_trace(out_stream(output, file), r.trace);
    std::cerr << "steps: " << r.trace.steps.size() << ", swaps: " << r.swaps << ", traversals: " << r.traversals
              << ", shallow-first: " << (is_shallow_first(r.trace) ? "yes" : "no") << "\n";
    return kOk;
}

int cmd_bound(const std::string& path, const EvalFlags& fl) {
    SourceFile f = load(path);
    Strategy st{parse_strategy(fl.strategy), fl.seed};
    Relation rel = parse_relation(fl.relation);
    BoundReport rep;
    try {
        rep = verify_bound(f.program, f.regions, st, rel);
    } catch (const CbvSyntaxError& e) {
        std::cout << e.what() << "\n";
        return kRejected;
    }
    std::cout << rep.to_text();
    return rep.pass() ? kOk : kRejected;
}

int cmd_unfold(const std::string& path, unsigned i) {
    SourceFile f = load(path);
    Program u = unfold(f.program, i, f.regions);
    std::cout << print(u) << "\n";
    std::cout << "size: " << size(u) << ", weighted size: " << size(u, SizeConvention::weighted) << "\n";
    return kOk;
}

int cmd_translate(const std::string& path, const std::string& output) {
    SourceFile f = load(path);
    SourceFile g;
    g.regions = f.regions;
    g.aliases = f.aliases;
    try {
        g.program = refs::translate(refs::NuState{f.program, f.locations});
    } catch (const refs::TranslationError& e) {
        std::cout << e.what() << "\n";
        return kRejected;
    }
    std::ofstream file;
    out_stream(output, file) << print_source(g);
    return kOk;
}

int demo_zprime(unsigned n, const std::string& strategy) {
    Strategy st{parse_strategy(strategy), 0};
    RunOptions opts;
    opts.strict_shallow = false;
    std::cout << "n\tsteps\tfinal size\tmax size\n";
    for (unsigned k = 1; k <= n; ++k) {
        SourceFile f = enc::zprime_chain(k);
        auto r = run(f.program, Relation::full, f.regions, st, opts);
        std::cout << k << "\t" << r.trace.steps.size() << "\t" << size(r.final_program) << "\t" << r.max_plain_size
                  << (r.halted ? "" : "\t(fuel exhausted)") << "\n";
    }
    return kOk;
}

int demo_run(bool threads, unsigned m, unsigned n, unsigned p, const std::string& strategy, std::uint64_t seed) {
    SourceFile f = threads ? enc::build_run_threads(m, n, p) : enc::build_run(m, n, p);
    auto r = refs::run(refs::NuState{f.program, f.locations}, Relation::cbv_ext, {parse_strategy(strategy), seed});
    std::cout << "steps: " << r.steps.size() << "\n";
    for (const char* x : {"x", "y", "z"}) {
        auto v = refs::lookup(r.final_state.program, x);
        auto d = v ? enc::decode_nat(*v) : std::nullopt;
        std::cout << x << " = " << (d ? std::to_string(*d) : std::string("?")) << "\n";
    }
    return r.halted ? kOk : kRejected;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Light multithreaded lambda calculus with regions: checkers, evaluator and bounds"};
    app.require_subcommand(1);
    std::string file, output;
    bool flag_a = false;
    unsigned number = 0;
    EvalFlags fl;
    fl.seed = default_seed();

    auto* parse = app.add_subcommand("parse", "Parse and pretty-print a program");
    parse->add_option("file", file, "Source file ('-' for stdin)")->required();
    parse->add_flag("--addresses", flag_a, "List every occurrence with its address and depth");

    auto* dc = app.add_subcommand("depthcheck", "Decide well-formedness and print the derivation");
    dc->add_option("file", file)->required();
    dc->add_flag("-q,--quiet", flag_a, "Only print the verdict");

    auto* tc = app.add_subcommand("typecheck", "Typecheck an annotated program");
    tc->add_option("file", file)->required();
    tc->add_flag("--derivation", flag_a, "Print the typing derivation");
    tc->add_option("--depth", number, "Depth of the judgement");

    auto add_eval_flags = [&](CLI::App* c) {
        c->add_option("--relation", fl.relation, "full | outer | cbv | cbv-ext");
        c->add_option("--strategy", fl.strategy, "cbv | shallow | random | deepfirst");
        c->add_option("--seed", fl.seed, "Seed of the random strategy (default $LMT_SEED or 0)");
    };
    auto* ev = app.add_subcommand("eval", "Run a program");
    ev->add_option("file", file)->required();
    add_eval_flags(ev);
    ev->add_option("--fuel", fl.fuel, "Maximum number of steps");
    ev->add_option("--trace", fl.trace, "Write the trace as JSON lines");
    ev->add_flag("-v,--verbose", fl.verbose, "Print every step");
    ev->add_flag("--under-binders", fl.under_binders, "Reference programs: also evaluate below '!'");

    auto* ro = app.add_subcommand("reorder", "Reorder a trace into shallow-first order");
    ro->add_option("trace", file)->required();
    ro->add_option("-o,--output", output, "Output trace (default stdout)");

    auto* bd = app.add_subcommand("bound", "Check the polynomial bound on a run");
    bd->add_option("file", file)->required();
    add_eval_flags(bd);

    auto* uf = app.add_subcommand("unfold", "Print the unfolding at a depth");
    uf->add_option("file", file)->required();
    uf->add_option("--depth", number, "Depth index")->required();

    auto* tr = app.add_subcommand("translate-refs", "Translate a reference program into the region language");
    tr->add_option("file", file)->required();
    tr->add_option("-o,--output", output, "Output file (default stdout)");

    auto* demo = app.add_subcommand("demo", "Built-in demonstrations: zprime, run, run-threads");
    std::string which;
    unsigned n = 8;
    demo->add_option("name", which)->required()->check(CLI::IsMember({"zprime", "run", "run-threads"}));
    demo->add_option("-n", n, "zprime: largest chain length");
    std::vector<unsigned> stores{0, 1, 2};
    demo->add_option("--stores", stores, "run: initial numerals in x, y, z")->expected(3)->delimiter(',');
    demo->add_option("--strategy", fl.strategy, "Scheduling strategy");
    demo->add_option("--seed", fl.seed, "Seed of the random strategy");
    bool strategy_given = false;
    demo->callback([&] { strategy_given = demo->count("--strategy") > 0; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*parse) return cmd_parse(file, flag_a);
        if (*dc) return cmd_depthcheck(file, flag_a);
        if (*tc) return cmd_typecheck(file, flag_a, number);
        if (*ev) return cmd_eval(file, fl);
        if (*ro) return cmd_reorder(file, output);
        if (*bd) return cmd_bound(file, fl);
        if (*uf) return cmd_unfold(file, number);
        if (*tr) return cmd_translate(file, output);
        if (*demo) {
            if (which == "zprime") return demo_zprime(n, strategy_given ? fl.strategy : "deepfirst");
            return demo_run(which == "run-threads", stores[0], stores[1], stores[2], fl.strategy, fl.seed);
        }
    } catch (const UsageError& e) {
        std::cerr << "lmt: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "lmt: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "lmt: " << e.what() << "\n";
        return kRejected;
    }
    return kUsage;
}

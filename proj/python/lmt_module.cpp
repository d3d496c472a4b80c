// Python bindings. Programs cross the boundary as source text.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lmt/bounds.hpp"
#include "lmt/depth.hpp"
#include "lmt/encodings.hpp"
#include "lmt/parse.hpp"
#include "lmt/reduce.hpp"
#include "lmt/refs.hpp"
#include "lmt/typecheck.hpp"

namespace py = pybind11;
using namespace lmt;

namespace {

py::dict wellformed(const std::string& source) {
    auto f = parse_source(source);
    auto r = check_wf(f.program, f.regions, {}, 0, f.locations);
    py::dict out;
    out["ok"] = r.ok();
    if (!r.ok()) {
        out["address"] = r.error->address.to_string();
        out["rule"] = r.error->rule;
        out["message"] = r.error->message;
    }
    return out;
}

py::dict type_of(const std::string& source) {
    auto f = parse_source(source);
    auto r = typecheck(f.program, f.regions, {}, 0, f.locations);
    py::dict out;
    out["ok"] = r.ok();
    if (r.ok()) out["type"] = to_string(r.type());
    else out["error"] = explain(*r.error);
    return out;
}

py::dict evaluate(const std::string& source, const std::string& relation, const std::string& strategy,
                  std::uint64_t seed, std::size_t fuel) {
    auto f = parse_source(source);
    RunOptions o;
    o.fuel = fuel;
    auto r = run(f.program, parse_relation(relation), f.regions, {parse_strategy(strategy), seed}, o);
    py::list rules;
    for (const auto& s : r.trace.steps) rules.append(rule_name(s.redex.rule));
    py::dict out;
    out["halted"] = r.halted;
    out["steps"] = r.trace.steps.size();
    out["rules"] = rules;
    out["final"] = print(r.final_program);
    out["max_size"] = r.max_plain_size;
    return out;
}

py::dict bound(const std::string& source, const std::string& relation, const std::string& strategy, std::uint64_t seed) {
    auto f = parse_source(source);
    auto rep = verify_bound(f.program, f.regions, {parse_strategy(strategy), seed}, parse_relation(relation));
    py::dict out;
    out["pass"] = rep.pass();
    out["size"] = rep.weighted_size;
    out["depth"] = rep.depth;
    out["bound"] = rep.bound;
    out["steps"] = rep.steps;
    out["note"] = rep.note;
    return out;
}

std::vector<std::optional<unsigned>> run_cells(unsigned m, unsigned n, unsigned p, bool threads, std::uint64_t seed) {
    auto s = threads ? enc::build_run_threads(m, n, p) : enc::build_run(m, n, p);
    Strategy st{seed ? StrategyKind::random : StrategyKind::cbv_leftmost, seed};
    auto r = refs::run({s.program, s.locations}, Relation::cbv_ext, st);
    std::vector<std::optional<unsigned>> out;
    for (const char* x : {"x", "y", "z"}) {
        auto v = refs::lookup(r.final_state.program, x);
        out.push_back(v ? enc::decode_nat(*v) : std::nullopt);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_lmt, m) {
    m.doc() = "Light multithreaded lambda calculus with regions";
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    m.def("format", [](const std::string& s) { return print_source(parse_source(s)); }, py::arg("source"));
    m.def("depth", [](const std::string& s) {
        auto f = parse_source(s);
        return depth(f.program, f.regions);
    }, py::arg("source"));
    m.def("size", [](const std::string& s, bool weighted) {
        return size(parse_source(s).program, weighted ? SizeConvention::weighted : SizeConvention::plain);
    }, py::arg("source"), py::arg("weighted") = false);
    m.def("wellformed", &wellformed, py::arg("source"));
    m.def("typecheck", &type_of, py::arg("source"));
    m.def("run", &evaluate, py::arg("source"), py::arg("relation") = "cbv", py::arg("strategy") = "cbv",
          py::arg("seed") = 0, py::arg("fuel") = 1000000);
    m.def("bound", &bound, py::arg("source"), py::arg("relation") = "cbv", py::arg("strategy") = "cbv",
          py::arg("seed") = 0);
    // unfolded programs are measures only and do not parse back
    m.def("unfold", [](const std::string& s, unsigned i) {
        auto f = parse_source(s);
        Program u = unfold(f.program, i, f.regions);
        py::dict out;
        out["program"] = print(u);
        out["size"] = size(u);
        out["weighted_size"] = size(u, SizeConvention::weighted);
        return out;
    }, py::arg("source"), py::arg("depth"));
    m.def("nat", [](unsigned n) { return print(enc::nat(n)); }, py::arg("n"));
    m.def("decode_nat", [](const std::string& s) { return enc::decode_nat(parse_program(s, enc::aliases())); },
          py::arg("term"));
    m.def("run_cells", &run_cells, py::arg("m"), py::arg("n"), py::arg("p"), py::arg("threads") = false,
          py::arg("seed") = 0);
}

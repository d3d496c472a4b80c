#include <istream>
#include <ostream>

#include <json.hpp>

#include "lmt/parse.hpp"
#include "lmt/reduce.hpp"

namespace lmt {

using nlohmann::json;

void write_trace(std::ostream& os, const Trace& t) {
    json init = {
        {"step", 0},
        {"rule", "init"},
        {"relation", relation_name(t.relation)},
        {"strategy", strategy_name(t.strategy.kind)},
        {"seed", t.strategy.seed},
        {"regions", print_header(t.regions)},
        {"program", print(t.initial)},
    };
    os << init.dump() << "\n";
    for (const auto& s : t.steps) {
        json rec = {
            {"step", s.index},
            {"rule", rule_name(s.redex.rule)},
            {"address", s.redex.address.to_bits()},
            {"store", s.redex.store ? json(s.redex.store->to_bits()) : json(nullptr)},
            {"depth", s.redex.depth},
            {"program", print(s.after)},
            {"seed", s.seed},
        };
        os << rec.dump() << "\n";
    }
}

Trace read_trace(std::istream& is) {
    Trace t;
    std::string line;
    bool have_init = false;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw std::runtime_error("trace line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!have_init) {
            if (rec.value("rule", "") != "init") throw std::runtime_error("trace does not start with an init record");
            SourceFile f = parse_source(rec.at("regions").get<std::string>() + "\n" + rec.at("program").get<std::string>());
            t.initial = f.program;
            t.regions = f.regions;
            t.relation = parse_relation(rec.at("relation").get<std::string>());
            t.strategy.kind = parse_strategy(rec.at("strategy").get<std::string>());
            t.strategy.seed = rec.at("seed").get<std::uint64_t>();
            have_init = true;
            continue;
        }
        TraceStep s;
        s.index = rec.at("step").get<std::size_t>();
        s.redex.rule = parse_rule(rec.at("rule").get<std::string>());
        s.redex.address = Address::parse(rec.at("address").get<std::string>());
        if (!rec.at("store").is_null()) s.redex.store = Address::parse(rec.at("store").get<std::string>());
        s.redex.depth = rec.at("depth").get<unsigned>();
        s.after = parse_program(rec.at("program").get<std::string>());
        s.seed = rec.value("seed", std::uint64_t{0});
        t.steps.push_back(std::move(s));
    }
    if (!have_init) throw std::runtime_error("empty trace");
    return t;
}

}  // namespace lmt

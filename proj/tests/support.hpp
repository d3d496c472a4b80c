#pragma once

// Helpers shared by the unit tests: corpus access and small oracles that
// recompute things the library computes, written independently of it.

#include <filesystem>
#include <fstream>
#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lmt/parse.hpp"
#include "lmt/syntax.hpp"

namespace support {

inline const char* kReadApplyWrite = "region #r : depth = 0\nlet !x = get(#r) in set(#r, (!x) ($x)) || #r <= !(\\x. x *)";

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CorpusEntry {
    std::string name;
    lmt::SourceFile file;
};

inline std::vector<CorpusEntry> corpus(const std::string& ext = ".lmt") {
    std::vector<CorpusEntry> out;
    for (const auto& e : std::filesystem::directory_iterator(LMT_CORPUS_DIR)) {
        if (e.path().extension() != ext) continue;
        out.push_back({e.path().filename().string(), lmt::parse_source(read_file(e.path()))});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    return out;
}

// -- oracles ---------------------------------------------------------------------

// Children of a node, skipping type wrappers, in address order.
inline std::vector<lmt::Term> kids(const lmt::Term& t) {
    using lmt::Kind;
    lmt::Term s = t;
    while (s->kind == Kind::gen || s->kind == Kind::inst) s = s->first;
    std::vector<lmt::Term> out;
    switch (s->kind) {
    case Kind::var:
    case Kind::region:
    case Kind::unit:
    case Kind::get:
        break;
    case Kind::lam:
    case Kind::bang:
    case Kind::para:
    case Kind::set:
    case Kind::store:
    case Kind::nu:
    case Kind::bag:
        out.push_back(s->first);
        break;
    default:
        out.push_back(s->first);
        out.push_back(s->second);
    }
    return out;
}

inline lmt::Term unwrap(lmt::Term t) {
    while (t->kind == lmt::Kind::gen || t->kind == lmt::Kind::inst) t = t->first;
    return t;
}

// Depth by walking the path: one per !/§ label left behind, R(r) per store.
inline unsigned oracle_depth(const lmt::Program& p, const std::string& bits, const lmt::RegionContext& R) {
    lmt::Term cur = unwrap(p);
    unsigned d = 0;
    for (char c : bits) {
        if (cur->kind == lmt::Kind::bang || cur->kind == lmt::Kind::para) d += 1;
        if (cur->kind == lmt::Kind::store) d += R.depth(cur->name);
        cur = unwrap(kids(cur).at(c - '0'));
    }
    return d;
}

inline void oracle_walk(const lmt::Term& t, std::string w, const std::function<void(const std::string&, const lmt::Term&)>& f) {
    lmt::Term s = unwrap(t);
    f(w, s);
    auto ks = kids(s);
    for (std::size_t i = 0; i < ks.size(); ++i) oracle_walk(ks[i], w + char('0' + i), f);
}

inline std::size_t oracle_size(const lmt::Program& p) {
    std::size_t n = 0;
    oracle_walk(p, "", [&](const std::string&, const lmt::Term&) { ++n; });
    return n;
}

// Free occurrences of x, by explicit scope tracking.
inline std::size_t oracle_occ(const lmt::Term& t, const std::string& x) {
    using lmt::Kind;
    lmt::Term s = unwrap(t);
    switch (s->kind) {
    case Kind::var:
        return s->name == x ? 1 : 0;
    case Kind::lam:
    case Kind::nu:
        return s->name == x ? 0 : oracle_occ(s->first, x);
    case Kind::let_bang:
    case Kind::let_para:
        return oracle_occ(s->first, x) + (s->name == x ? 0 : oracle_occ(s->second, x));
    case Kind::get:
        return s->var_target && s->name == x ? 1 : 0;
    case Kind::set:
    case Kind::store:
        return (s->var_target && s->name == x ? 1 : 0) + oracle_occ(s->first, x);
    default: {
        std::size_t n = 0;
        for (const auto& k : kids(s)) n += oracle_occ(k, x);
        return n;
    }
    }
}

// Multiset of printed threads: a cheap ≡ check for programs that differ only
// in the order and grouping of parallel threads (no α-renaming involved).
inline std::multiset<std::string> thread_bag(const lmt::Program& p) {
    std::multiset<std::string> out;
    std::function<void(const lmt::Term&)> go = [&](const lmt::Term& t) {
        if (t->kind == lmt::Kind::par) {
            go(t->first);
            go(t->second);
        } else {
            out.insert(lmt::print(t));
        }
    };
    go(p);
    return out;
}

}  // namespace support

#include "lmt/parse.hpp"

#include <cctype>
#include <sstream>

namespace lmt {

namespace {

enum class Tok { ident, region, number, sym, end };

struct Token {
    Tok kind;
    std::string text;
    int line;
    int column;
};

// Unicode spellings accepted as synonyms of the ASCII syntax.
const std::pair<const char*, const char*> kUnicode[] = {
    {"λ", "\\"}, {"§", "$"}, {"∥", "||"}, {"⋆", "*"}, {"⊸", "-o"}, {"⇐", "<="}, {"∀", "forall"}, {"ν", "nu"},
};

const char* kSymbols[] = {"||", "<=", "-o", "\\", ".", "(", ")", "[", "]", "!", "$", "*",
                          ",", ":", "=", "{", "}", ";"};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

std::vector<Token> lex(const std::string& src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (src.compare(i, 2, "//") == 0) {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        int l = line, cl = col;
        bool matched = false;
        for (auto [u, a] : kUnicode) {
            std::size_t n = std::char_traits<char>::length(u);
            if (src.compare(i, n, u) == 0) {
                std::string text = a;
                out.push_back({ident_start(text[0]) ? Tok::ident : Tok::sym, text, l, cl});
                advance(n);
                matched = true;
                break;
            }
        }
        if (matched) continue;
        if (c == '#') {
            std::size_t j = i + 1;
            while (j < src.size() && ident_char(src[j])) ++j;
            if (j == i + 1) throw ParseError("expected a region name after '#'", l, cl);
            out.push_back({Tok::region, src.substr(i + 1, j - i - 1), l, cl});
            advance(j - i);
            continue;
        }
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < src.size() && ident_char(src[j])) ++j;
            out.push_back({Tok::ident, src.substr(i, j - i), l, cl});
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            out.push_back({Tok::number, src.substr(i, j - i), l, cl});
            advance(j - i);
            continue;
        }
        for (const char* s : kSymbols) {
            std::size_t n = std::char_traits<char>::length(s);
            if (src.compare(i, n, s) == 0) {
                out.push_back({Tok::sym, s, l, cl});
                advance(n);
                matched = true;
                break;
            }
        }
        if (!matched) throw ParseError(std::string("unexpected character '") + c + "'", l, cl);
    }
    out.push_back({Tok::end, "", line, col});
    return out;
}

bool reserved(const std::string& s) {
    static const std::set<std::string> words = {"let", "in", "nu", "gen", "get", "set", "forall", "region", "loc", "type"};
    return words.count(s) != 0;
}

class Parser {
public:
    Parser(std::vector<Token> toks, std::map<std::string, TypeAlias> aliases)
        : toks_(std::move(toks)), aliases_(std::move(aliases)) {}

    SourceFile source() {
        SourceFile f;
        while (true) {
            if (is_ident("region")) {
                header_region(f);
            } else if (is_ident("type")) {
                header_alias();
            } else if (is_ident("loc")) {
                next();
                std::string x = expect_var();
                expect(":");
                f.locations[x] = type();
            } else {
                break;
            }
            accept(";");
        }
        f.aliases = aliases_;
        f.program = par();
        expect_end();
        for (const auto& r : regions_of(f.program))
            if (!f.regions.contains(r)) throw ParseError("region #" + r + " is not declared", 1, 1);
        for (const auto& [r, info] : f.regions.entries())
            if (info.content) check_type_regions(info.content, f.regions);
        for (const auto& [x, t] : f.locations) check_type_regions(t, f.regions);
        return f;
    }

    Program program_only() {
        Program p = par();
        expect_end();
        return p;
    }

    Type type_only() {
        Type t = type();
        expect_end();
        return t;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::map<std::string, TypeAlias> aliases_;

    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool is_sym(const char* s, std::size_t k = 0) const { return peek(k).kind == Tok::sym && peek(k).text == s; }
    bool is_ident(const char* s, std::size_t k = 0) const { return peek(k).kind == Tok::ident && peek(k).text == s; }

    [[noreturn]] void fail(const std::string& msg) const {
        const Token& t = peek();
        std::string found = t.kind == Tok::end ? "end of input" : "'" + (t.kind == Tok::region ? "#" + t.text : t.text) + "'";
        throw ParseError(msg + ", found " + found, t.line, t.column);
    }

    bool accept(const char* s) {
        if (is_sym(s)) {
            next();
            return true;
        }
        return false;
    }

    void expect(const char* s) {
        if (!accept(s)) fail(std::string("expected '") + s + "'");
    }

    void expect_keyword(const char* s) {
        if (!is_ident(s)) fail(std::string("expected '") + s + "'");
        next();
    }

    void expect_end() {
        if (peek().kind != Tok::end) fail("unexpected trailing input");
    }

    std::string expect_var() {
        if (peek().kind != Tok::ident || reserved(peek().text)) fail("expected a variable");
        return next().text;
    }

    std::string expect_region() {
        if (peek().kind != Tok::region) fail("expected a region constant");
        return next().text;
    }

    void check_type_regions(const Type& t, const RegionContext& R) {
        for (const auto& r : regions_of(t))
            if (!R.contains(r)) throw ParseError("region #" + r + " is not declared", 1, 1);
    }

    // -- header ------------------------------------------------------------

    void header_region(SourceFile& f) {
        next();
        const Token& at = peek();
        std::string r = expect_region();
        expect(":");
        expect_keyword("depth");
        expect("=");
        if (peek().kind != Tok::number) fail("expected a depth");
        unsigned d = static_cast<unsigned>(std::stoul(next().text));
        Type content;
        if (accept(",")) {
            expect_keyword("type");
            expect("=");
            content = type();
        }
        if (f.regions.contains(r)) throw ParseError("region #" + r + " declared twice", at.line, at.column);
        f.regions.declare(r, d, content);
    }

    void header_alias() {
        next();
        std::string name = expect_var();
        TypeAlias a;
        while (peek().kind == Tok::ident && !is_sym("=")) a.params.push_back(expect_var());
        expect("=");
        a.body = type();
        aliases_[name] = a;
    }

    // -- types -------------------------------------------------------------

    Type type() {
        if (is_ident("forall")) {
            next();
            std::string t = expect_var();
            expect(".");
            return ty::forall(t, type());
        }
        Type dom = prefix_type();
        if (accept("-o")) {
            Effect e1, e2;
            if (accept("{")) {
                e1 = effect();
                expect(";");
                e2 = effect();
                expect("}");
            }
            return ty::arrow(dom, type(), e1, e2);
        }
        return dom;
    }

    Effect effect() {
        Effect e;
        // Regions may be written with or without their '#'.
        while (peek().kind == Tok::region || peek().kind == Tok::ident) {
            e.insert(next().text);
            if (!accept(",")) break;
        }
        return e;
    }

    Type prefix_type() {
        if (accept("!")) return ty::bang(prefix_type());
        if (accept("$")) return ty::para(prefix_type());
        if (is_ident("Reg")) {
            next();
            std::string r = expect_region();
            return ty::region(r, prefix_type());
        }
        if (peek().kind == Tok::ident) {
            auto it = aliases_.find(peek().text);
            if (it != aliases_.end()) {
                next();
                const TypeAlias& a = it->second;
                Type body = a.body;
                std::vector<Type> args;
                for (std::size_t k = 0; k < a.params.size(); ++k) args.push_back(prefix_type());
                // Parallel substitution through fresh intermediates.
                std::vector<std::string> tmp;
                std::set<std::string> avoid = free_type_vars(body);
                for (const auto& arg : args) avoid.merge(free_type_vars(arg));
                for (const auto& p : a.params) {
                    tmp.push_back(fresh_name(p, avoid));
                    avoid.insert(tmp.back());
                    body = subst_type(body, ty::var(tmp.back()), p);
                }
                for (std::size_t k = 0; k < args.size(); ++k) body = subst_type(body, args[k], tmp[k]);
                return body;
            }
        }
        return atom_type();
    }

    Type atom_type() {
        if (peek().kind == Tok::number && peek().text == "1") {
            next();
            return ty::unit();
        }
        if (is_ident("B")) {
            next();
            return ty::behaviour();
        }
        if (accept("(")) {
            Type t = type();
            expect(")");
            return t;
        }
        if (peek().kind == Tok::ident && !reserved(peek().text) && peek().text != "Reg") return ty::var(next().text);
        fail("expected a type");
    }

    // -- programs ----------------------------------------------------------

    Term par() {
        Term left = expr();
        if (accept("||")) return term::par(left, par());
        return left;
    }

    Term expr() {
        if (accept("\\")) return lambda();
        if (is_ident("let")) {
            next();
            bool bang;
            if (accept("!"))
                bang = true;
            else if (accept("$"))
                bang = false;
            else
                fail("expected '!' or '$' after let");
            std::string x = expect_var();
            expect("=");
            Term bound = par();
            expect_keyword("in");
            Term body = expr();
            return bang ? term::let_bang(x, bound, body) : term::let_para(x, bound, body);
        }
        if (is_ident("nu")) {
            next();
            std::string x = expect_var();
            Type t;
            if (accept(":")) t = type();
            expect(".");
            return term::nu(x, t, expr());
        }
        if (is_ident("gen")) {
            next();
            std::string t = expect_var();
            expect(".");
            return term::gen(t, expr());
        }
        if (is_sym("<=", 1) && (peek().kind == Tok::region || (peek().kind == Tok::ident && !reserved(peek().text)))) {
            bool loc = peek().kind == Tok::ident;
            std::string target = next().text;
            next();
            Term value = expr();
            return loc ? term::store_loc(target, value) : term::store(target, value);
        }
        return application();
    }

    Term lambda() {
        char modal = 0;
        if (accept("!"))
            modal = '!';
        else if (accept("$"))
            modal = '$';
        std::string x = expect_var();
        Type annot;
        if (accept(":")) annot = type();
        expect(".");
        Term body = expr();
        if (modal == '!') return term::lam_bang(x, body, annot);
        if (modal == '$') return term::lam_para(x, body, annot);
        return term::lam(x, body, annot);
    }

    bool starts_prefix() const {
        const Token& t = peek();
        if (t.kind == Tok::region) return !is_sym("<=", 1);
        if (t.kind == Tok::ident) {
            if (t.text == "get" || t.text == "set") return true;
            return !reserved(t.text) && !is_sym("<=", 1);
        }
        return is_sym("(") || is_sym("!") || is_sym("$") || is_sym("*");
    }

    Term application() {
        if (!starts_prefix()) fail("expected a term");
        Term acc = prefix();
        while (starts_prefix()) acc = term::app(acc, prefix());
        return acc;
    }

    Term prefix() {
        if (accept("!")) return term::bang(prefix());
        if (accept("$")) return term::para(prefix());
        return postfix();
    }

    Term postfix() {
        Term t = primary();
        while (accept("[")) {
            Type a = type();
            expect("]");
            t = term::inst(t, a);
        }
        return t;
    }

    std::pair<std::string, bool> target() {
        if (peek().kind == Tok::region) return {next().text, false};
        return {expect_var(), true};
    }

    Term primary() {
        if (accept("*")) return term::unit();
        if (accept("(")) {
            Term t = par();
            expect(")");
            return t;
        }
        if (peek().kind == Tok::region) return term::region(next().text);
        if (is_ident("get")) {
            next();
            expect("(");
            auto [r, loc] = target();
            expect(")");
            return loc ? term::get_loc(r) : term::get(r);
        }
        if (is_ident("set")) {
            next();
            expect("(");
            auto [r, loc] = target();
            expect(",");
            Term v = par();
            expect(")");
            return loc ? term::set_loc(r, v) : term::set(r, v);
        }
        return term::var(expect_var());
    }
};

// -- printer -----------------------------------------------------------------

// Precedence levels: 0 parallel, 1 binders/let/store, 2 application,
// 3 prefix modalities, 4 postfix instantiation and atoms.
class Printer {
public:
    std::ostringstream os;

    void term(const Term& t, int level) {
        const Node& n = *t;
        switch (n.kind) {
        case Kind::var: os << n.name; return;
        case Kind::region: os << "#" << n.name; return;
        case Kind::unit: os << "*"; return;
        case Kind::get: os << "get(" << target(n) << ")"; return;
        case Kind::set:
            os << "set(" << target(n) << ", ";
            term(n.first, 0);
            os << ")";
            return;
        case Kind::bang:
        case Kind::para:
            if (level > 3) os << "(";
            os << (n.kind == Kind::bang ? "!" : "$");
            term(n.first, 3);
            if (level > 3) os << ")";
            return;
        case Kind::inst:
            term(n.first, 4);
            os << " [" << to_string(n.annot) << "]";
            return;
        case Kind::app:
            if (level > 2) os << "(";
            term(n.first, 2);
            os << " ";
            term(n.second, 3);
            if (level > 2) os << ")";
            return;
        case Kind::par:
            if (level > 0) os << "(";
            term(n.first, 1);
            os << " || ";
            term(n.second, 0);
            if (level > 0) os << ")";
            return;
        case Kind::bag:
            os << "bag " << n.copies << " (";
            term(n.first, 0);
            os << ")";
            return;
        default:
            break;
        }
        if (level > 1) os << "(";
        switch (n.kind) {
        case Kind::lam: {
            const Node& b = *n.first;
            bool sugar = (b.kind == Kind::let_bang || b.kind == Kind::let_para) && b.name == n.name &&
                         b.first->kind == Kind::var && b.first->name == n.name;
            os << "\\";
            if (sugar) os << (b.kind == Kind::let_bang ? "!" : "$");
            os << n.name;
            if (n.annot) os << ":" << to_string(n.annot);
            os << ". ";
            term(sugar ? b.second : n.first, 1);
            break;
        }
        case Kind::let_bang:
        case Kind::let_para:
            os << "let " << (n.kind == Kind::let_bang ? "!" : "$") << n.name << " = ";
            term(n.first, 0);
            os << " in ";
            term(n.second, 1);
            break;
        case Kind::store:
            os << target(n) << " <= ";
            term(n.first, 1);
            break;
        case Kind::nu:
            os << "nu " << n.name;
            if (n.annot) os << " : " << to_string(n.annot);
            os << ". ";
            term(n.first, 1);
            break;
        case Kind::gen:
            os << "gen " << n.name << ". ";
            term(n.first, 1);
            break;
        default:
            break;
        }
        if (level > 1) os << ")";
    }

    static std::string target(const Node& n) { return n.var_target ? n.name : "#" + n.name; }
};

}  // namespace

bool SourceFile::typed() const {
    if (regions.empty()) return true;
    for (const auto& [r, info] : regions.entries())
        if (!info.content) return false;
    return true;
}

SourceFile parse_source(const std::string& text) { return Parser(lex(text), {}).source(); }

Program parse_program(const std::string& text, const std::map<std::string, TypeAlias>& aliases) {
    return Parser(lex(text), aliases).program_only();
}

Type parse_type(const std::string& text, const std::map<std::string, TypeAlias>& aliases) {
    return Parser(lex(text), aliases).type_only();
}

std::string print(const Program& p) {
    Printer pr;
    pr.term(p, 0);
    return pr.os.str();
}

std::string print_header(const RegionContext& R, const std::map<std::string, Type>& locations) {
    std::ostringstream os;
    for (const auto& [r, info] : R.entries()) {
        os << "region #" << r << " : depth = " << info.depth;
        if (info.content) os << ", type = " << to_string(info.content);
        os << "\n";
    }
    for (const auto& [x, t] : locations) os << "loc " << x << " : " << to_string(t) << "\n";
    return os.str();
}

std::string print_source(const SourceFile& f) {
    std::string header = print_header(f.regions, f.locations);
    return header + (header.empty() ? "" : "\n") + print(f.program) + "\n";
}

}  // namespace lmt

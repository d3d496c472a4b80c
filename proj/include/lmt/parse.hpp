#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmt/syntax.hpp"

namespace lmt {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line, int column)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
          line(line),
          column(column) {}
    int line;
    int column;
};

/// A type abbreviation from the header, e.g. `type List u = ...`.
struct TypeAlias {
    std::vector<std::string> params;
    Type body;
};

struct SourceFile {
    Program program;
    RegionContext regions;
    std::map<std::string, TypeAlias> aliases;
    /// Free memory locations of a reference program (`loc x : Reg #r !A`).
    std::map<std::string, Type> locations;
    /// True when every declared region carries a content type.
    bool typed() const;
};

/// Parses a whole file: header declarations followed by one program.
/// Throws ParseError, including for region constants missing from the header.
SourceFile parse_source(const std::string& text);
/// Parses a bare program (no header, no region check).
Program parse_program(const std::string& text, const std::map<std::string, TypeAlias>& aliases = {});
Type parse_type(const std::string& text, const std::map<std::string, TypeAlias>& aliases = {});

std::string print(const Program& p);
/// Region and location declarations, one per line.
std::string print_header(const RegionContext& R, const std::map<std::string, Type>& locations = {});
/// Header plus program; parse_source(print_source(f)) reproduces f.
std::string print_source(const SourceFile& f);

}  // namespace lmt

#pragma once
// Parser, desugarer and printer for LImp sources and qualifier files.

#include <string>
#include <vector>

#include "art/program.hpp"

namespace art {

// throws InputError with a located diagnostic
Program parseProgram(const std::string& text);
std::vector<Qualifier> parseQualifiers(const std::string& text);
ExprPtr parsePredicate(const std::string& text);
RefType parseType(const std::string& text);

std::string printProgram(const Program& p);
std::string printBlock(const Block& b, int indent);
std::string printProgExpr(const ExprPtr& e);
std::string printSchema(const Schema& s);

}  // namespace art

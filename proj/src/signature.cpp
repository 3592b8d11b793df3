#include "effrw/signature.hpp"

#include <algorithm>
#include <stdexcept>

namespace effrw {

bool ParamDomain::contains(const std::string& v) const {
  return std::find(values.begin(), values.end(), v) != values.end();
}

std::vector<SymbolId> SymbolDecl::identities() const {
  if (!param_domain) return {SymbolId{name, {}}};
  std::vector<SymbolId> out;
  for (const auto& v : param_domain->values) out.push_back(SymbolId{name, {v}});
  return out;
}

SymbolDecl SymbolDecl::effect(std::string name, std::size_t arity,
                              std::optional<ParamDomain> domain) {
  SymbolDecl d;
  d.name = std::move(name);
  d.kind = SymbolKind::Effect;
  d.effect_arity = arity;
  d.param_domain = std::move(domain);
  return d;
}

SymbolDecl SymbolDecl::function(std::string name, std::vector<Type> args, Type result,
                                std::optional<ParamDomain> domain) {
  SymbolDecl d;
  d.name = std::move(name);
  d.kind = SymbolKind::Function;
  d.arg_types = std::move(args);
  d.result_type = std::move(result);
  d.param_domain = std::move(domain);
  return d;
}

bool operator==(const SymbolDecl& a, const SymbolDecl& b) {
  if (a.name != b.name || a.kind != b.kind || a.param_domain != b.param_domain) return false;
  if (a.kind == SymbolKind::Effect) return a.effect_arity == b.effect_arity;
  return a.arg_types == b.arg_types && a.result_type == b.result_type;
}

void Signature::declare(SymbolDecl decl) {
  if (decl.name.empty()) throw std::invalid_argument("symbol with empty name");
  if (auto it = decls_.find(decl.name); it != decls_.end()) {
    if (it->second.arity() != decl.arity())
      throw std::invalid_argument("symbol '" + decl.name + "' redeclared with a different arity");
    throw std::invalid_argument("symbol '" + decl.name + "' declared twice");
  }
  if (decl.param_domain && decl.param_domain->values.empty())
    throw std::invalid_argument("symbol '" + decl.name + "' has an empty parameter domain");
  decls_.emplace(decl.name, std::move(decl));
}

const SymbolDecl* Signature::find(const std::string& name) const {
  auto it = decls_.find(name);
  return it == decls_.end() ? nullptr : &it->second;
}

const SymbolDecl& Signature::at(const std::string& name) const {
  if (auto* d = find(name)) return *d;
  throw std::out_of_range("unknown symbol '" + name + "'");
}

std::vector<SymbolId> Signature::identities() const {
  std::vector<SymbolId> out;
  for (const auto& [_, d] : decls_)
    for (auto& id : d.identities()) out.push_back(std::move(id));
  return out;
}

std::vector<SymbolId> Signature::effect_identities() const {
  std::vector<SymbolId> out;
  for (const auto& [_, d] : decls_)
    if (d.kind == SymbolKind::Effect)
      for (auto& id : d.identities()) out.push_back(std::move(id));
  return out;
}

} // namespace effrw

#pragma once
// Refinement-erased helpers: location/type-variable unification and the
// annotation-list computations used by elaboration.

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "art/types.hpp"

namespace art {

using Unfolded = std::set<std::pair<std::string, std::string>>;  // (location, constructor)

// first-order unification of a formal type against an actual one
struct Unifier {
  std::set<std::string> locVars, tyVars;
  std::map<std::string, std::string> locs;
  std::map<std::string, BasePtr> tys;
  // formal is matched against actual; returns false on a shape clash
  bool unify(const BasePtr& formal, const BasePtr& actual);
};

// actual <: formal physically (null <: ?ref, ref <: ?ref, ?ref <: ref with a proof obligation)
bool physSub(const BasePtr& actual, const BasePtr& formal);

// location-name supply; a copy is taken per control-flow path
struct LocNamer {
  std::set<std::string> used;
  std::set<std::string> idents;  // program identifiers, avoided unless naming that variable's cell
  std::string fresh(const std::string& hint, bool forVar = false);
  void merge(const LocNamer& o) { used.insert(o.used.begin(), o.used.end()); }
};

// locations of a variable's type
std::set<std::string> locQuery(const Env& gamma, const std::string& x);

std::vector<std::string> unfoldList(const std::string& x, const Env& gamma, const Heap& sigma, Unfolded& u);

// (L, C) for every location holding an application
Unfolded woundLocs(const Heap& sigma);

// dependency order: a location is folded after the locations its record points into
// throws InputError on a cycle
std::vector<std::string> foldOrder(const std::set<std::string>& locs, const Heap& sigma);

// locations that are applications in target but records in sigma, closed over
// records they point to, in fold order; U loses the folded pairs
std::vector<std::string> foldList(const Heap& sigma, const Heap& target, Unfolded& u);
// same, starting from an explicit set of locations
std::vector<std::string> foldClosure(const Heap& sigma, std::set<std::string> seeds);

bool aliasCheck(const std::string& l, const Heap& s1, const Heap& s2);

std::vector<std::string> padLocs(const Heap& sigma, const Heap& target);

}  // namespace art

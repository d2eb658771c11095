#pragma once

#include <trapdoor/semantic/ast.hpp>
#include <trapdoor/semantic/cycles.hpp>

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace trapdoor::semantic {

/// A value that data can flow into. Declarations are state variables,
/// parameters and locals; the other kinds are pseudo-variables keyed by the
/// node that produces them.
struct VarKey {
    enum class Kind : std::uint8_t {
        Decl,        // id = state_var / parameter node
        Return,      // id = function node; its returned value
        CallResult,  // id = low_level_call node; its result
        Sender,      // id = function/modifier node; msg.sender inside it
    };
    Kind kind = Kind::Decl;
    NodeId id = 0;

    auto operator<=>(const VarKey&) const = default;
};

struct StateVarInfo {
    NodeId decl = 0;
    std::string name;
    std::string contract;
    TypeTag type_tag = TypeTag::Other;
    std::set<VarKey> dependants;
};

struct InputInfo {
    std::set<VarKey> roots;
    std::set<VarKey> dependants;
};

/// Who can change a state variable after deployment.
struct Mutators {
    std::vector<std::string> backdoors;     // names of B functions writing it
    std::vector<NodeId> external_calls;     // low_level_call results assigned to it
    bool constructor_writes = false;
    bool open_writes = false;               // written by an unguarded public function
};

struct SemanticSummary {
    std::shared_ptr<const ContractAst> ast;

    std::vector<StateVarInfo> s_a, s_i, s_b, s_c;
    std::set<NodeId> F;  // functions and modifiers reachable from transfer/transferFrom
    InputInfo i_s, i_r, i_a;
    std::set<NodeId> N;  // end nodes inside F
    std::set<NodeId> B;  // backdoor functions
    std::set<NodeId> C;  // every low_level_call node
    CallGraph call_graph;

    /// Data-flow edges source -> targets and their forward closure.
    std::map<VarKey, std::set<VarKey>> flow;
    std::map<VarKey, std::set<VarKey>> closure;
    std::map<NodeId, Mutators> mutators;   // keyed by state_var id
    std::map<NodeId, NodeId> llc_targets;  // low_level_call -> merged function
    std::vector<std::string> notes;

    /// Closure of `key` (always contains `key`).
    std::set<VarKey> dep(const VarKey& key) const;
    /// Variables read by an expression, with call results folded in.
    std::set<VarKey> reads(NodeId expr) const;
    /// Enclosing function or modifier, if any.
    std::optional<NodeId> callable_of(NodeId node) const;
    /// Conditions tied to an end node, nearest first, with their nest
    /// distance: a require/assert condition is 1, each enclosing `if` adds 1
    /// (a revert/return's innermost `if` is 1).
    std::vector<std::pair<int, NodeId>> end_conditions(NodeId end_node, int max_distance) const;
    bool is_mutable(NodeId state_var) const;
    std::string name_of(NodeId id) const;
};

/// Entry points whose parameters seed I.
bool is_entry_function(const Node& n);

SemanticSummary summarize(const ContractAst& ast);
SemanticSummary summarize(std::shared_ptr<const ContractAst> ast);

nlohmann::json to_json(const SemanticSummary& s);

} // namespace trapdoor::semantic

#pragma once

#include <trapdoor/semantic/ast.hpp>

#include <optional>
#include <string>
#include <vector>

namespace trapdoor::semantic {

/// Programmatic construction of AST documents. Identifiers and calls are
/// given by name and resolved in build(): locals and parameters of the
/// enclosing function first, then state variables of the same contract.
/// Names that do not resolve are left with refs = null.
class AstBuilder {
public:
    using Id = NodeId;

    explicit AstBuilder(NodeId first_id = 1) : next_id_(first_id) {}

    /// Starts a contract; later declarations attach to its contract node.
    Id begin_contract(std::string name);

    Id state_var(std::string name, TypeTag tag, bool constant = false,
                 std::optional<Id> init = std::nullopt);
    Id param(std::string name, TypeTag tag, std::optional<Id> init = std::nullopt);
    Id local(std::string name, TypeTag tag, Id init) { return param(std::move(name), tag, init); }
    Id function(std::string name, Visibility vis, std::vector<Id> params,
                std::vector<Id> modifiers, Id body);
    Id modifier(std::string name, std::vector<Id> params, Id body);

    Id block(std::vector<Id> statements);
    Id if_(Id cond, Id then_block, std::optional<Id> else_block = std::nullopt);
    Id call(std::string callee, std::vector<Id> args = {});
    Id low_level_call(std::string target, std::vector<Id> args = {});
    Id require(Id cond, std::string message = {});
    Id assert_(Id cond);
    Id revert(std::string message = {});
    Id ret(std::optional<Id> expr = std::nullopt);
    Id assign(Id lhs, Id rhs, std::string op = "=");
    Id binop(std::string op, Id lhs, Id rhs);
    Id unop(std::string op, Id operand);
    Id index(Id base, Id key) { return binop("[]", base, key); }
    Id ident(std::string name);
    Id literal(std::string text);
    Id msg_sender();

    nlohmann::json build() const;

private:
    Id add(NodeKind kind, std::string name, std::vector<Id> children = {});
    Node& node(Id id);

    NodeId next_id_;
    std::vector<Node> nodes_;
    std::vector<std::size_t> owner_;  // contract index per node
    std::vector<std::pair<std::string, Id>> contracts_;  // name, contract node id
};

} // namespace trapdoor::semantic

#pragma once

// Compact contract AST. One JSON document per token:
//
//   {"schema_version": 1,
//    "contracts": [{"name": "...", "nodes": [{"id", "kind", "name", "type_tag",
//                   "constant", "visibility", "children", "refs"}, ...]}]}
//
// Only "id" and "kind" are required on a node. Ids are unique across the
// whole document. Shape conventions used by the analyses:
//
//   function / modifier   children = parameters..., modifier invocations
//                         (call nodes, functions only)..., body block
//   parameter             also used for locals; optional initializer child
//   state_var             optional initializer child
//   if                    condition, then-block, optional else-block
//   require / assert      condition, optional message literal
//   revert                optional message literal
//   return                optional expression
//   assignment            name = operator ("=", "+=", ...); lhs, rhs
//   binary_op             name = operator; "[]" is an index (base, key) and
//                         unary operators ("!", "-") take one child
//   call                  name = callee; refs = function or modifier id
//   low_level_call        name = "Contract.function"; children = arguments
//   member_access         "msg.sender" is a leaf; others wrap their base
//   identifier            refs = declaration id

#include <trapdoor/common.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace trapdoor::semantic {

using NodeId = std::int64_t;

class AstError : public Error {
public:
    using Error::Error;
};

enum class NodeKind {
    Contract,
    StateVar,
    Function,
    Modifier,
    Parameter,
    Block,
    If,
    Call,
    LowLevelCall,
    Require,
    Assert,
    Revert,
    Return,
    Assignment,
    BinaryOp,
    Identifier,
    Literal,
    MemberAccess,
};

enum class TypeTag { Address, AddressList, Bool, Int, Uint, String, Mapping, Other };
enum class Visibility { Public, External, Internal, Private };

std::string_view to_string(NodeKind k);
std::string_view to_string(TypeTag t);
std::string_view to_string(Visibility v);
std::optional<NodeKind> parse_node_kind(std::string_view s);
std::optional<TypeTag> parse_type_tag(std::string_view s);
std::optional<Visibility> parse_visibility(std::string_view s);

struct Node {
    NodeId id = 0;
    NodeKind kind = NodeKind::Literal;
    std::string name;
    TypeTag type_tag = TypeTag::Other;
    bool constant = false;
    Visibility visibility = Visibility::Internal;
    std::vector<NodeId> children;
    std::optional<NodeId> refs;
    // Set by the parser when refs is missing or points outside the document.
    bool external = false;
};

struct ContractEntry {
    std::string name;
    std::vector<NodeId> node_ids;  // document order
};

struct ContractAst {
    std::vector<ContractEntry> contracts;
    std::vector<Node> nodes;  // all contracts, document order

    bool contains(NodeId id) const { return index_.count(id) != 0; }
    const Node& at(NodeId id) const;
    std::optional<NodeId> parent(NodeId id) const;
    /// Index into `contracts` of the entry that listed this node.
    std::size_t contract_of(NodeId id) const;

    /// Rebuilds lookup tables; called by the parser.
    void reindex();

private:
    std::unordered_map<NodeId, std::size_t> index_;
    std::unordered_map<NodeId, NodeId> parent_;
    std::unordered_map<NodeId, std::size_t> contract_;
};

/// Throws AstError on malformed documents, duplicate ids, dangling or shared
/// children, cyclic child links and unknown kinds (naming the offending id).
ContractAst parse_ast(const nlohmann::json& document);
ContractAst parse_ast_text(std::string_view text);

nlohmann::json to_document(const ContractAst& ast);

} // namespace trapdoor::semantic

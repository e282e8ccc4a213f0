#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "restarch/uri_model.hpp"

namespace restarch {

enum class SelectorForm { absolute, shortcut };

/// A parsed user query. Every accepted syntax (absolute path, `//` shortcut,
/// chained calls) lands on the same canonical ResourcePath.
///
/// Grammar:
///   selector = segment+ ;
///   segment  = "/" level [ "/" pattern ] | "//" level [ "/" pattern ] ;
///
/// A `//LEVEL` segment inserts `*` segments along the unique shortest
/// hierarchy chain from the previous anchor (or from the root) to LEVEL.
class Selector {
public:
    static Selector parse(std::string_view raw,
                          std::shared_ptr<const Hierarchy> h = Hierarchy::xnat());

    /// The empty selector, the starting point for chained calls.
    static Selector root(std::shared_ptr<const Hierarchy> h = Hierarchy::xnat());

    /// Wraps an already validated path.
    static Selector from_path(ResourcePath path,
                              std::shared_ptr<const Hierarchy> h = Hierarchy::xnat());

    /// Appends `level`; a pattern-less final segment becomes `*` first.
    Selector chain(std::string_view level, std::optional<std::string> pattern = std::nullopt) const;

    const std::string& raw() const noexcept { return raw_; }
    SelectorForm form() const noexcept { return form_; }
    const ResourcePath& expanded() const noexcept { return expanded_; }
    const std::shared_ptr<const Hierarchy>& hierarchy() const noexcept { return hierarchy_; }

private:
    Selector(std::string raw, SelectorForm form, ResourcePath path,
             std::shared_ptr<const Hierarchy> h);

    std::string raw_;
    SelectorForm form_ = SelectorForm::absolute;
    ResourcePath expanded_;
    std::shared_ptr<const Hierarchy> hierarchy_;
};

}  // namespace restarch

#pragma once

#include <map>
#include <string>
#include <vector>

#include "csales/common.hpp"

namespace csales::prompts {

// Template ids used across the pipeline. Fixture files key on these, so the
// strings are part of the wire contract.
inline constexpr const char* kGeneralPreference = "general_preference";
inline constexpr const char* kDialogueOpenness = "dialogue_openness";
inline constexpr const char* kPurchaseAnalysis = "purchase_analysis";
inline constexpr const char* kSeeker = "seeker";
inline constexpr const char* kActionPlanning = "action_planning";
inline constexpr const char* kReactPlanning = "react_planning";
inline constexpr const char* kPreferenceProbe = "preference_probe";
inline constexpr const char* kPersuasion = "persuasion";

// Text assets with <<slot>> markers. The compiled-in set matches the files
// under assets/prompts byte for byte; a directory override lets operators
// experiment without rebuilding.
class PromptLibrary {
public:
    static PromptLibrary builtin();
    static PromptLibrary from_dir(const std::string& dir);

    const std::string& text(const std::string& template_id) const;
    std::vector<std::string> ids() const;

    // Replaces every <<name>> with its value. Unknown or unfilled slots are
    // errors: a silently broken prompt is worse than a crash.
    static std::string render_text(const std::string& template_text,
                                   const std::map<std::string, std::string>& slots);

    std::string render(const std::string& template_id,
                       const std::map<std::string, std::string>& slots) const {
        return render_text(text(template_id), slots);
    }

private:
    std::map<std::string, std::string> templates_;
};

}  // namespace csales::prompts

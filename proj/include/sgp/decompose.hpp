#pragma once
// Modality decomposition: raw artifacts become a unified textual view for the
// predictor. Text passes through; image/audio go through an encoder. The gold
// graph is unreachable from here by construction.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgp/backends.hpp"
#include "sgp/corpus.hpp"

namespace sgp {

struct DecomposedArtifact {
    std::string artifact_id;
    Modality modality = Modality::text;
    std::string text_view;
    std::map<std::string, std::string> descriptors;
};

struct DecomposeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class MediaEncoder {
public:
    virtual ~MediaEncoder() = default;
    virtual DecomposedArtifact decode(const Artifact& artifact) const = 0;
    virtual BackendFingerprint fingerprint() const = 0;
};

struct EncoderSet {
    const MediaEncoder* image = nullptr;
    const MediaEncoder* audio = nullptr;
    // Closed descriptor-key vocabulary for audio paralinguistics; keys outside
    // it are dropped.
    std::vector<std::string> audio_descriptor_vocab = {"voice_tremor", "loudness", "tempo"};
};

// Offline encoders that parse stored descriptor records ("scene:"/"tags:" for
// images, "transcript:" plus paralinguistic lines for audio).
const EncoderSet& offline_encoders();

DecomposedArtifact decompose(const Artifact& artifact, const EncoderSet& encoders);
std::vector<DecomposedArtifact> decompose_bundle(const ArtifactBundle& bundle,
                                                 const EncoderSet& encoders);

// Deterministic prompt/embedding view: artifacts in bundle order, each under
// a "[modality | genre | artifact_id]" header.
std::string flatten_bundle(const std::vector<DecomposedArtifact>& decomposed,
                           const ArtifactBundle& bundle);
std::string decompose_and_flatten(const ArtifactBundle& bundle, const EncoderSet& encoders);

}  // namespace sgp

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace textgraph {

/// Base class for every error raised by the engine. `kind()` is a stable,
/// machine-readable identifier used in the CLI's error JSON.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define TEXTGRAPH_DEFINE_ERROR(Name)                                         \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& message) : Error(#Name, message) {} \
    }

// corpus
TEXTGRAPH_DEFINE_ERROR(DocumentEmptyAfterPreprocessing);
TEXTGRAPH_DEFINE_ERROR(MissingVector);
TEXTGRAPH_DEFINE_ERROR(DimensionMismatch);
TEXTGRAPH_DEFINE_ERROR(ZeroVector);
TEXTGRAPH_DEFINE_ERROR(DuplicateDocument);
TEXTGRAPH_DEFINE_ERROR(ParseError);
TEXTGRAPH_DEFINE_ERROR(IoError);

// simgraph / mstability
TEXTGRAPH_DEFINE_ERROR(DegenerateCorpus);
TEXTGRAPH_DEFINE_ERROR(Disconnected);
TEXTGRAPH_DEFINE_ERROR(InvalidArgument);

// metrics
TEXTGRAPH_DEFINE_ERROR(SizeMismatch);
TEXTGRAPH_DEFINE_ERROR(ZeroEntropy);
TEXTGRAPH_DEFINE_ERROR(UndefinedPMI);

// harmclf
TEXTGRAPH_DEFINE_ERROR(InsufficientClass);
TEXTGRAPH_DEFINE_ERROR(DegenerateLabels);
TEXTGRAPH_DEFINE_ERROR(MissingPartition);

// pipeline
TEXTGRAPH_DEFINE_ERROR(ConfigError);
TEXTGRAPH_DEFINE_ERROR(StaleArtifact);

#undef TEXTGRAPH_DEFINE_ERROR

}  // namespace textgraph

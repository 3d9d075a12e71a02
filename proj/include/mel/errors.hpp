// Copyright 2026 The MEL Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "mel/types.hpp"

namespace mel {

// Base class for all failures raised by the library. The CLI turns these
// into one-line diagnostics and a nonzero exit code.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// ---- kb_store ----

class DuplicateEntity : public Error {
 public:
  explicit DuplicateEntity(const EntityId& id)
      : Error("duplicate entity id: " + id.value()), id(id) {}
  EntityId id;
};

class MalformedRecord : public Error {
 public:
  MalformedRecord(std::size_t line, const std::string& reason)
      : Error("malformed record at line " + std::to_string(line) + ": " + reason),
        line(line),
        reason(reason) {}
  std::size_t line;
  std::string reason;
};

class UnknownEntity : public Error {
 public:
  explicit UnknownEntity(const EntityId& id) : Error("unknown entity: " + id.value()), id(id) {}
  EntityId id;
};

// ---- identifier_codec ----

class SeparatorInName : public Error {
 public:
  explicit SeparatorInName(const std::string& name)
      : Error("name contains the identifier separator: '" + name + "'"), name(name) {}
  std::string name;
};

class UnparseableIdentifier : public Error {
 public:
  UnparseableIdentifier(const std::string& text, const std::string& mode)
      : Error("cannot parse identifier '" + text + "' in mode " + mode), text(text) {}
  std::string text;
};

class ReservedTokenInSequence : public Error {
 public:
  explicit ReservedTokenInSequence(TokenId token)
      : Error("reserved token id " + std::to_string(token) + " in sequence"), token(token) {}
  TokenId token;
};

// ---- prefix_trie ----

class EmptySequence : public Error {
 public:
  EmptySequence() : Error("empty token sequence") {}
};

class NotAnIdentifier : public Error {
 public:
  NotAnIdentifier() : Error("token sequence is not a complete identifier in the trie") {}
};

class CorruptTrieFile : public Error {
 public:
  CorruptTrieFile(std::size_t offset, const std::string& reason)
      : Error("corrupt trie file at offset " + std::to_string(offset) + ": " + reason),
        offset(offset),
        reason(reason) {}
  std::size_t offset;
  std::string reason;
};

// Shared by every versioned binary artifact.
class VersionMismatch : public Error {
 public:
  VersionMismatch(const std::string& artifact, const std::string& found)
      : Error(artifact + " file has unsupported version tag '" + found + "'") {}
};

class CorruptFile : public Error {
 public:
  CorruptFile(const std::string& artifact, const std::string& reason)
      : Error("corrupt " + artifact + " file: " + reason) {}
};

// ---- scorer ----

class UntrainedModel : public Error {
 public:
  UntrainedModel() : Error("scorer has an empty vocabulary; train or load it first") {}
};

class TokenOutsideVocab : public Error {
 public:
  explicit TokenOutsideVocab(TokenId token)
      : Error("token id " + std::to_string(token) + " is outside the scorer vocabulary"),
        token(token) {}
  TokenId token;
};

class EmptyCorpus : public Error {
 public:
  EmptyCorpus() : Error("no training pairs supplied") {}
};

// ---- constrained_decoder ----

class EmptyTrie : public Error {
 public:
  EmptyTrie() : Error("decoding trie contains no identifiers") {}
};

class TooManyIdentifiers : public Error {
 public:
  TooManyIdentifiers(std::size_t count, std::size_t bound)
      : Error("exhaustive ranking over " + std::to_string(count) +
              " identifiers exceeds bound " + std::to_string(bound)) {}
};

// ---- entity_ranker ----

class UnfinishedHypothesis : public Error {
 public:
  UnfinishedHypothesis() : Error("ranking requires finished hypotheses only") {}
};

class NoHypotheses : public Error {
 public:
  NoHypotheses() : Error("beam search produced no finished hypotheses") {}
};

// ---- corpus ----

class MalformedLine : public Error {
 public:
  MalformedLine(std::size_t line, const std::string& reason)
      : Error("malformed line " + std::to_string(line) + ": " + reason),
        line(line),
        reason(reason) {}
  std::size_t line;
  std::string reason;
};

class MentionTooLong : public Error {
 public:
  MentionTooLong(std::size_t needed, std::size_t budget)
      : Error("mention plus markers need " + std::to_string(needed) +
              " tokens but the input budget is " + std::to_string(budget)) {}
};

class EntityHasNoNames : public Error {
 public:
  explicit EntityHasNoNames(const EntityId& id)
      : Error("entity " + id.value() + " has no names"), id(id) {}
  EntityId id;
};

// ---- evaluator ----

class MissingGold : public Error {
 public:
  MissingGold() : Error("evaluation instance lacks a gold entity") {}
};

}  // namespace mel

"""spaCy dependency parsing plus Berkeley neural constituency parsing.

This is the production backend: one spaCy pipeline with the benepar
component supplies both parse views over spaCy's tokenization. Imports
are lazy; a missing library or model is a fatal, clearly named error so
batch jobs stop instead of silently degrading.
"""

from __future__ import annotations

from .rulebackend import ParsedView


class BackendUnavailable(RuntimeError):
    pass


class SpacyBeneparBackend:
    name = "spacy+benepar"

    def __init__(self, spacy_model: str = "en_core_web_md",
                 benepar_model: str = "benepar_en3"):
        try:
            import benepar  # noqa: F401
            import spacy
        except ImportError as exc:
            raise BackendUnavailable(
                f"spacy/benepar not installed: {exc}") from exc
        try:
            self.nlp = spacy.load(spacy_model)
        except OSError as exc:
            raise BackendUnavailable(
                f"model load failure for {spacy_model!r}: {exc}") from exc
        if "benepar" not in self.nlp.pipe_names:
            try:
                self.nlp.add_pipe("benepar", config={"model": benepar_model})
            except (OSError, LookupError) as exc:
                raise BackendUnavailable(
                    f"model load failure for {benepar_model!r}: {exc}") from exc
        self.spacy_model = spacy_model
        self.benepar_model = benepar_model
        import spacy as _spacy
        self.spacy_version = _spacy.__version__

    def provenance(self) -> dict:
        return {"backend": self.name, "spacy_version": self.spacy_version,
                "spacy_model": self.spacy_model,
                "benepar_model": self.benepar_model}

    def _view(self, doc) -> ParsedView:
        sents = list(doc.sents)
        if len(sents) != 1:
            # multi-sentence utterances get a TOP wrapper over per-sentence parses
            tree = "(TOP " + " ".join(s._.parse_string for s in sents) + ")"
        else:
            parse = sents[0]._.parse_string
            tree = parse if parse.startswith("(TOP") else f"(TOP {parse})"
        tokens = [(t.text, t.lemma_ or t.text.lower(), t.tag_) for t in doc]
        deps = []
        for t in doc:
            if t.head is t:
                deps.append((t.i + 1, 0, "root"))
            else:
                deps.append((t.i + 1, t.head.i + 1, t.dep_))
        return ParsedView(tokens=tokens, tree=tree, deps=deps)

    def parse_text(self, text: str) -> ParsedView:
        return self._view(self.nlp(text))

    def parse_pretokenized(self, words: list[str]) -> ParsedView:
        from spacy.tokens import Doc
        doc = Doc(self.nlp.vocab, words=list(words))
        for name, proc in self.nlp.pipeline:
            doc = proc(doc)
        return self._view(doc)

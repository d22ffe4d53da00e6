import json
import re

import pytest
from hypothesis import given, strategies as st

from texttab.corpus import Document, DocumentCollection, split_sentences
from texttab.extraction import (CanonicalValue, ExtractionError, export_interchange,
                                extract_builtin, import_interchange,
                                normalize_mention, validate_nugget)


def make_doc(text, doc_id="d1"):
    return Document(id=doc_id, text=text)


def extract(text):
    doc = make_doc(text)
    return doc, extract_builtin(doc, split_sentences(doc.text))


class TestExtractBuiltin:
    def test_date_and_entity(self):
        doc, nuggets = extract("The crash on October 25, 1999 involved US Airways.")
        got = [(n.label, n.mention) for n in nuggets]
        assert got == [("DATE", "October 25, 1999"), ("ENTITY", "US Airways")]

    def test_empty_document(self):
        _, nuggets = extract("")
        assert nuggets == []

    def test_grouped_number(self):
        doc, nuggets = extract("about 1,234 cases")
        assert [(n.label, n.mention) for n in nuggets] == [("NUMBER", "1,234")]

    def test_number_inside_date_suppressed(self):
        _, nuggets = extract("On 25.10.1999 it rained.")
        labels = [n.label for n in nuggets]
        assert labels == ["DATE"]

    def test_sentence_initial_capital_skipped(self):
        _, nuggets = extract("Lufthansa flew to Hamburg. Berlin was next.")
        mentions = [n.mention for n in nuggets if n.label == "ENTITY"]
        assert mentions == ["Hamburg"]

    def test_sorted_by_span_start(self):
        _, nuggets = extract("We saw 7 planes near Dallas on 1999-10-25 with 12 crew.")
        starts = [n.mention_span[0] for n in nuggets]
        assert starts == sorted(starts)

    def test_invariants_hold(self):
        doc, nuggets = extract(
            "Flight 93 left Newark Airport on September 11, 2001. "
            "About 2,977 people died. The report cost 3.5 million dollars.")
        for n in nuggets:
            validate_nugget(n, doc)

    @given(st.text(alphabet=st.sampled_from("AaBb 019,.!?/-"), max_size=60))
    def test_invariants_random_text(self, text):
        doc, nuggets = extract(text)
        for n in nuggets:
            validate_nugget(n, doc)

    def test_per_document_purity(self):
        text = "Delta flew on 25.10.1999."
        _, first = extract(text)
        _, again = extract(text)
        assert first == again


# 20+ pattern-table cases for normalize_mention
NORMALIZE_CASES = [
    ("DATE", "October 25, 1999", CanonicalValue("date", "1999-10-25")),
    ("DATE", "25.10.1999", CanonicalValue("date", "1999-10-25")),
    ("DATE", "1999-10-25", CanonicalValue("date", "1999-10-25")),
    ("DATE", "10/25/1999", CanonicalValue("date", "1999-10-25")),
    ("DATE", "25 October 1999", CanonicalValue("date", "1999-10-25")),
    ("DATE", "Oct 25, 1999", CanonicalValue("date", "1999-10-25")),
    ("DATE", "January 1, 2020", CanonicalValue("date", "2020-01-01")),
    ("DATE", "1.1.2020", CanonicalValue("date", "2020-01-01")),
    ("DATE", "2020-02-29", CanonicalValue("date", "2020-02-29")),
    ("DATE", "7 Mar 2021", CanonicalValue("date", "2021-03-07")),
    ("DATE", "3/4/1987", CanonicalValue("date", "1987-03-04")),
    ("DATE", "December 31, 1999", CanonicalValue("date", "1999-12-31")),
    ("DATE", "next Tuesday", CanonicalValue("text", "next Tuesday")),
    ("DATE", "30.02.2001", CanonicalValue("text", "30.02.2001")),  # invalid day
    ("DATE", "2019-13-01", CanonicalValue("text", "2019-13-01")),  # invalid month
    ("NUMBER", "1,234", CanonicalValue("number", "1234")),
    ("NUMBER", "1,234.5", CanonicalValue("number", "1234.5")),
    ("NUMBER", "1.234,56", CanonicalValue("number", "1234.56")),  # German style
    ("NUMBER", "3,5", CanonicalValue("number", "3.5")),  # decimal comma
    ("NUMBER", "42", CanonicalValue("number", "42")),
    ("NUMBER", "0.25", CanonicalValue("number", "0.25")),
    ("NUMBER", "twelve", CanonicalValue("text", "twelve")),
    ("ORG", "  US Airways ", CanonicalValue("text", "US Airways")),
    ("PERSON", "Jane Doe", CanonicalValue("text", "Jane Doe")),
]


class TestNormalizeMention:
    @pytest.mark.parametrize("label,mention,expected", NORMALIZE_CASES)
    def test_pattern_table(self, label, mention, expected):
        assert normalize_mention(label, mention) == expected

    def test_canonical_date_identity(self):
        once = normalize_mention("DATE", "1999-10-25")
        again = normalize_mention("DATE", once.value)
        assert once == again

    @given(st.sampled_from(["DATE", "NUMBER", "ORG"]), st.text(max_size=30))
    def test_total_and_deterministic(self, label, mention):
        first = normalize_mention(label, mention)
        assert first == normalize_mention(label, mention)
        assert first.kind in ("date", "number", "text")


class TestInterchange:
    def collection(self):
        return DocumentCollection([
            make_doc("The crash involved US Airways. It was bad.", "d1"),
        ])

    def record(self, **overrides):
        base = {"document_id": "d1", "label": "ORG", "mention": "US Airways",
                "start": 19, "end": 29, "context_sentence": None}
        base.update(overrides)
        return base

    def write(self, tmp_path, *records):
        path = tmp_path / "nuggets.jsonl"
        path.write_text("".join(json.dumps(r) + "\n" for r in records))
        return path

    def test_import_org_entity(self, tmp_path):
        path = self.write(tmp_path, self.record())
        nuggets = import_interchange(path, self.collection())
        assert len(nuggets) == 1
        n = nuggets[0]
        assert n.label == "ORG"
        assert n.mention == "US Airways"
        assert n.context_sentence == "The crash involved US Airways."
        assert n.position == 19 / len("The crash involved US Airways. It was bad.")

    def test_mention_span_mismatch(self, tmp_path):
        path = self.write(tmp_path, self.record(mention="United"))
        with pytest.raises(ExtractionError, match="d1#19-29#ORG"):
            import_interchange(path, self.collection())

    def test_unknown_document(self, tmp_path):
        path = self.write(tmp_path, self.record(document_id="zzz"))
        with pytest.raises(ExtractionError, match="zzz"):
            import_interchange(path, self.collection())

    def test_malformed_record(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"document_id": "d1"}\n')
        with pytest.raises(ExtractionError, match="malformed"):
            import_interchange(path, self.collection())

    def test_provided_context_kept(self, tmp_path):
        path = self.write(tmp_path, self.record(
            context_sentence="The crash involved US Airways. It was bad."))
        nuggets = import_interchange(path, self.collection())
        assert nuggets[0].context_sentence.endswith("bad.")

    def test_export_import_round_trip(self, tmp_path):
        coll = self.collection()
        doc = coll.get("d1")
        original = extract_builtin(doc, split_sentences(doc.text))
        path = tmp_path / "out.jsonl"
        export_interchange(original, path)
        again = import_interchange(path, coll)
        assert again == original

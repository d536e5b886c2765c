import json

import pytest

from outfitgen.catalog import Triplet, TripletKind
from outfitgen.errors import JobError, ParseError
from outfitgen.exemplars import ExemplarStore, add_exemplar
from outfitgen.gateway import (MockEmbedBackend, MockImageBackend,
                               MockTextBackend)
from outfitgen.pipeline import (GenerationRecord, PipelineDeps, StrategyKind,
                                StrategyParams, load_records,
                                parse_colors_textures, run_grid, run_job,
                                save_records, write_manifest)
from outfitgen.prompts import zero_shot_question
from outfitgen.rag import build_index, ingest_document


class TestParseColorsTextures:
    def test_exact_labeled_lines(self):
        assert parse_colors_textures("Colors: black, crimson\nTextures: velvet") == (
            ["black", "crimson"], ["velvet"])

    def test_case_insensitive_labels(self):
        assert parse_colors_textures("colors: RED\ntextures: silk, lace") == (
            ["RED"], ["silk", "lace"])

    def test_missing_labels_raise(self):
        with pytest.raises(ParseError):
            parse_colors_textures("Nice outfit!")

    def test_last_labeled_lines_win(self):
        text = ("Colors: wrong\nTextures: wrong\n"
                "Some chatter.\nColors: navy\nTextures: tweed")
        assert parse_colors_textures(text) == (["navy"], ["tweed"])

    def test_empties_dropped_and_items_trimmed(self):
        assert parse_colors_textures("Colors:  a , , b \nTextures: c,,") == (
            ["a", "b"], ["c"])


class CountingText:
    def __init__(self, inner=None):
        self.inner = inner or MockTextBackend()
        self.calls = 0

    def generate(self, req):
        self.calls += 1
        return self.inner.generate(req)


class ScriptedText:
    """Returns scripted outputs in order, then falls back to the mock."""

    def __init__(self, outputs):
        self.outputs = list(outputs)
        self.prompts = []

    def generate(self, req):
        self.prompts.append(req.prompt)
        if self.outputs:
            return self.outputs.pop(0)
        return MockTextBackend().generate(req)


def make_deps(text=None, embed=None, image=None, **params):
    embed = embed or MockEmbedBackend(dim=16)
    store = ExemplarStore()
    questions = [
        ("classic cruise outfit question", "A navy blazer with linen trousers."),
        ("bohemian festival outfit question", "A fringed vest over a maxi skirt."),
        ("sporty office outfit question", "A track blazer with knit joggers."),
    ]
    for q, a in questions:
        add_exemplar(store, q, a, embed)
    cot_store = ExemplarStore()
    cot_answers = [
        ("classic cruise palette question", "Colors: navy, white\nTextures: linen, leather"),
        ("gothic wedding palette question", "Colors: black, oxblood\nTextures: velvet, lace"),
        ("sporty party palette question", "Colors: grey, volt\nTextures: nylon, mesh"),
    ]
    for q, a in cot_answers:
        add_exemplar(cot_store, q, a, embed)
    pdf_chunks = ingest_document(
        "pdf-doc", "gothic velvet lace palettes suit formal evening ceremonies "
        "while classic navy wool fits interviews and meetings", "pdf",
        chunk_size=60, overlap=10)
    blog_chunks = ingest_document(
        "blog-doc", "street style favors denim canvas and faded color while "
        "evening looks lean on charmeuse sequins and block heels", "blog",
        chunk_size=60, overlap=10)
    return PipelineDeps(
        text_backend=text or MockTextBackend(),
        embed_backend=embed,
        image_backend=image or MockImageBackend(),
        params=StrategyParams(**params),
        exemplar_store=store,
        cot_exemplar_store=cot_store,
        indices={"pdf": build_index(pdf_chunks, embed),
                 "blog": build_index(blog_chunks, embed)},
        profiles={"text": "mock-text", "embed": "mock-embed", "image": "mock-image"},
        config_digest="testcfg",
    )


@pytest.fixture
def triplet():
    return Triplet("gothic", "wedding", "woman", TripletKind.SIMPLE)


class TestRunJob:
    def test_zs_record_shape_and_determinism(self, triplet):
        deps = make_deps()
        first = run_job(triplet, StrategyKind.ZS, deps)
        second = run_job(triplet, StrategyKind.ZS, deps)
        assert len(first.prompts) == 1
        assert first.description == second.description
        assert first.image_digest == second.image_digest
        assert first.id == second.id

    def test_cot_two_prompts_two_text_calls(self, triplet):
        counting = CountingText()
        deps = make_deps(text=counting)
        record = run_job(triplet, StrategyKind.COT, deps)
        assert len(record.prompts) == 2
        assert counting.calls == 2
        assert record.colors and record.textures

    def test_non_cot_records_have_one_prompt(self, triplet):
        deps = make_deps()
        for kind in (StrategyKind.ZS, StrategyKind.FS, StrategyKind.RAG_PDF,
                     StrategyKind.RAG_BLOG):
            assert len(run_job(triplet, kind, deps).prompts) == 1

    def test_fs_prompt_has_exactly_two_demonstrations(self, triplet):
        deps = make_deps()
        record = run_job(triplet, StrategyKind.FS, deps)
        assert record.prompts[0].text.count("Question:") == 3

    def test_rag_question_is_zero_shot_sentence(self, triplet):
        deps = make_deps()
        record = run_job(triplet, StrategyKind.RAG_PDF, deps)
        assert record.prompts[0].bindings["question"] == zero_shot_question(triplet)

    def test_rag_cites_exactly_the_assembled_chunks(self, triplet):
        deps = make_deps()
        record = run_job(triplet, StrategyKind.RAG_BLOG, deps)
        assert record.context_chunk_ids
        context = record.prompts[0].bindings["context"]
        parts = context.split("\n\n")
        assert len(parts) == len(record.context_chunk_ids)
        for ref in record.context_chunk_ids:
            assert ref.startswith("blog-doc:")

    def test_rag_context_respects_cap(self, triplet):
        deps = make_deps(context_max_chars=70)
        record = run_job(triplet, StrategyKind.RAG_PDF, deps)
        assert len(record.prompts[0].bindings["context"]) <= 70
        assert len(record.context_chunk_ids) >= 1

    def test_rag_budget_too_small_for_any_chunk_fails_loudly(self, triplet):
        deps = make_deps(context_max_chars=5)
        with pytest.raises(JobError) as exc:
            run_job(triplet, StrategyKind.RAG_PDF, deps)
        assert exc.value.stage == "retrieve"

    def test_cot_reprompt_recovers(self, triplet):
        scripted = ScriptedText(["no labels here at all",
                                 "Colors: navy\nTextures: wool",
                                 "final outfit description"])
        deps = make_deps(text=scripted)
        record = run_job(triplet, StrategyKind.COT, deps)
        assert record.colors == ["navy"]
        assert record.textures == ["wool"]
        assert len(record.prompts) == 2
        assert record.prompts[0].text.endswith(
            "\nAnswer only with the two labeled lines.")
        assert record.description == "final outfit description"

    def test_cot_double_parse_failure_is_job_error(self, triplet):
        scripted = ScriptedText(["still nothing", "again nothing"])
        deps = make_deps(text=scripted)
        with pytest.raises(JobError) as exc:
            run_job(triplet, StrategyKind.COT, deps)
        assert exc.value.stage == "cot_parse"

    def test_backend_failure_carries_stage(self, triplet):
        class Exploding:
            def generate(self, req):
                from outfitgen.errors import TransportError
                raise TransportError("prof", "boom")

        deps = make_deps(text=Exploding())
        with pytest.raises(JobError) as exc:
            run_job(triplet, StrategyKind.ZS, deps)
        assert exc.value.stage == "text"

    def test_image_prompt_truncated_at_cap(self, triplet):
        class LongText:
            def generate(self, req):
                return "x" * 5000

        class CapturingImage:
            def __init__(self):
                self.inner = MockImageBackend()
                self.prompts = []

            def generate(self, req):
                self.prompts.append(req.prompt)
                return self.inner.generate(req)

        capturing = CapturingImage()
        deps = make_deps(text=LongText(), image=capturing,
                         image_prompt_max_chars=2000)
        run_job(triplet, StrategyKind.ZS, deps)
        assert len(capturing.prompts[0]) == 2000

    def test_image_written_when_output_dir_given(self, triplet, tmp_path):
        deps = make_deps()
        record = run_job(triplet, StrategyKind.ZS, deps, output_dir=tmp_path)
        target = tmp_path / record.image_path
        assert target.exists()
        import hashlib
        assert hashlib.sha256(target.read_bytes()).hexdigest() == record.image_digest

    def test_timings_cover_stages(self, triplet):
        record = run_job(triplet, StrategyKind.COT, make_deps())
        assert {"render", "text_step1", "text_step2", "image"} <= set(record.timings)


def strip_timings(record: GenerationRecord) -> dict:
    data = record.to_dict()
    data.pop("timings")
    return data


class TestRunGrid:
    def grid_triplets(self, n=4):
        styles = ["gothic", "classic", "casual", "bohemian"]
        return [Triplet(styles[i % 4], "wedding", "woman", TripletKind.SIMPLE)
                for i in range(n)]

    def test_cardinality(self):
        deps = make_deps()
        result = run_grid(self.grid_triplets(4), list(StrategyKind), deps)
        assert result.attempted == 20
        assert len(result.records) == 20
        assert not result.failures

    def test_output_order_is_input_order(self):
        deps = make_deps()
        triplets = self.grid_triplets(3)
        result = run_grid(triplets, [StrategyKind.ZS, StrategyKind.FS], deps)
        expected = [(t.style, s.value) for t in triplets
                    for s in (StrategyKind.ZS, StrategyKind.FS)]
        got = [(r.triplet.style, r.strategy.value) for r in result.records]
        assert got == expected

    def test_parallelism_does_not_change_contents(self):
        deps = make_deps()
        triplets = self.grid_triplets(4)
        serial = run_grid(triplets, list(StrategyKind), deps, parallelism=1)
        threaded = run_grid(triplets, list(StrategyKind), deps, parallelism=8)
        assert [strip_timings(r) for r in serial.records] == [
            strip_timings(r) for r in threaded.records]

    def test_empty_strategy_list(self):
        result = run_grid(self.grid_triplets(2), [], make_deps())
        assert result.records == [] and result.failures == []

    def test_failures_collected_without_aborting(self):
        class FailsOnGothic:
            def __init__(self):
                self.inner = MockTextBackend()

            def generate(self, req):
                if "gothic" in req.prompt:
                    from outfitgen.errors import TransportError
                    raise TransportError("prof", "down")
                return self.inner.generate(req)

        deps = make_deps(text=FailsOnGothic())
        result = run_grid(self.grid_triplets(4), [StrategyKind.ZS], deps)
        assert len(result.failures) == 1
        assert len(result.records) == 3
        assert result.failures[0].stage == "text"


class TestPersistence:
    def test_records_jsonl_roundtrip(self, triplet, tmp_path):
        deps = make_deps()
        records = [run_job(triplet, kind, deps)
                   for kind in (StrategyKind.ZS, StrategyKind.COT)]
        path = tmp_path / "records.jsonl"
        save_records(records, path)
        loaded = load_records(path)
        assert [r.to_dict() for r in loaded] == [r.to_dict() for r in records]

    def test_load_records_names_bad_line(self, tmp_path):
        path = tmp_path / "records.jsonl"
        path.write_text('{"id": "ok"\n')
        from outfitgen.errors import EngineError
        with pytest.raises(EngineError) as exc:
            load_records(path)
        assert ":1:" in str(exc.value)

    def test_manifest_summarizes_run(self, triplet, tmp_path):
        deps = make_deps()
        result = run_grid([triplet], [StrategyKind.ZS], deps)
        write_manifest(tmp_path / "manifest.json", deps, result)
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["attempted"] == 1
        assert manifest["succeeded"] == 1
        assert manifest["config_digest"] == "testcfg"

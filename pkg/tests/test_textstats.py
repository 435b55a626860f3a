import pytest

from docsimp.metrics import compression_ratio, fkgl, split_sentences, syllable_count


def test_split_sentences_basic():
    assert split_sentences("One. Two! Three?") == ["One.", "Two!", "Three?"]
    assert split_sentences("No terminal") == ["No terminal"]
    assert split_sentences("Wait... what? Yes.") == ["Wait...", "what?", "Yes."]
    assert split_sentences("") == []


def test_syllable_counts():
    assert syllable_count("cat") == 1
    assert syllable_count("mat") == 1
    assert syllable_count("idiot") == 2
    assert syllable_count("signifying") == 3
    assert syllable_count("rhythm") == 1  # y counts as a vowel
    assert syllable_count("strength") == 1
    assert syllable_count("12") == 1  # no letters floors at one
    assert syllable_count("queueing") == 1  # one maximal vowel run: "ueuei"
    assert syllable_count("beautiful") == 3


def test_fkgl_hand_fixture_cat():
    # 6 monosyllabic words, 1 sentence: 0.39*6 + 11.8*1 - 15.59 = -1.45
    assert fkgl("The cat sat on the mat.") == pytest.approx(-1.45, abs=0.01)


def test_fkgl_hand_fixture_single_word():
    # 0.39*1 + 11.8*1 - 15.59 = -3.40
    assert fkgl("Go.") == pytest.approx(-3.40, abs=0.01)


def test_fkgl_hand_fixture_longer():
    # 15 words, 1 sentence, 21 syllables -> 5.85 + 16.52 - 15.59 = 6.78
    text = "It is a tale told by an idiot, full of sound and fury, signifying nothing."
    assert fkgl(text) == pytest.approx(6.78, abs=0.01)


def test_fkgl_invariant_under_doubling():
    text = "The cat sat on the mat. The dog ran to the tree."
    doubled = text + " " + text
    assert fkgl(doubled) == pytest.approx(fkgl(text), abs=1e-9)


def test_fkgl_rejects_empty_input():
    with pytest.raises(ValueError):
        fkgl("")
    with pytest.raises(ValueError):
        fkgl("... !!!")


def test_compression_ratio():
    assert compression_ratio("a b c d", "a b") == 0.5
    assert compression_ratio("a b", "a b") == 1.0
    assert compression_ratio("a b", "") == 0.0
    assert compression_ratio("", "") == 1.0
    with pytest.raises(ValueError):
        compression_ratio("", "something")


def test_compression_counts_tokens_not_chunks():
    # punctuation splits into separate tokens on both sides
    assert compression_ratio("Hello, world.", "Hi.") == pytest.approx(2 / 4)

//! Transcription fidelity: the generator must reproduce, up to structural
//! equality, the printed catalog formulas and the printed list of 88 weak
//! constraints. The formulas here are entered independently of the
//! generator, straight from the source tables.

use std::collections::HashSet;

use woods10_core::Expr;
use woods10_model::catalog::catalog;
use woods10_model::compositions::compositions_12;

/// phi_1..phi_37 exactly as printed, in prefix serialization.
const PHI_TEXT: [&str; 37] = [
    // phi_1
    "(+ (- (* 4 A) (/ (* 2 (^ A 2)) B)) C D (- (* 4 E) (/ (^ E 3) (* F G))) H I J)",
    // phi_2
    "(+ (- (* 4 A) (/ (* 2 (^ A 2)) B)) C D E (- (* 4 F) (/ (^ F 3) (* G H))) I J)",
    // phi_3
    "(+ (- (* 4 A) (/ (* 2 (^ A 2)) B)) (- (* 4 C) (/ (* 2 (^ C 2)) D)) (- (* 4 E) (/ (* 2 (^ E 2)) F)) (- (* 4 G) (/ (* 1/2 (^ G 4)) (* H I J))))",
    // phi_4
    "(+ (- (* 4 A) (/ (^ A 3) (* B C))) D E F (- (* 4 G) (/ (^ G 3) (* H I))) J)",
    // phi_5
    "(+ (- (* 4 A) (/ (* 2 (^ A 2)) B)) (- (* 4 C) (/ (* 2 (^ C 2)) D)) E (- (* 4 F) (/ (* 1/2 (^ F 4)) (* G H I))) J)",
    // phi_6
    "(+ (- (* 4 A) (/ (^ A 3) (* B C))) D E (- (* 4 F) (/ (^ F 3) (* G H))) I J)",
    // phi_7
    "(+ (- (* 4 A) (/ (* 2 (^ A 2)) B)) (- (* 4 C) (/ (* 2 (^ C 2)) D)) (- (* 4 E) (/ (* 1/2 (^ E 4)) (* F G H))) I J)",
    // phi_8
    "(+ (- (* 4 A) (/ (^ A 3) (* B C))) D (- (* 4 E) (/ (^ E 3) (* F G))) H I J)",
    // phi_9
    "(+ A (- (* 4 B) (/ (* 2 (^ B 2)) C)) (- (* 4 D) (/ (* 2 (^ D 2)) E)) (- (* 4 F) (/ (* 1/2 (^ F 4)) (* G H I))) J)",
    // phi_10
    "(+ A (- (* 4 B) (/ (* 1/2 (^ B 4)) (* C D E))) (- (* 4 F) (/ (* 1/2 (^ F 4)) (* G H I))) J)",
    // phi_11
    "(+ A (- (* 4 B) (/ (* 2 (^ B 2)) C)) (- (* 4 D) (/ (* 2 (^ D 2)) E)) (- (* 4 F) (/ (* 2 (^ F 2)) G)) (- (* 4 H) (/ (* 2 (^ H 2)) I)) J)",
    // phi_12
    "(+ (- (* 4 A) (/ (* 1/2 (^ A 4)) (* B C D))) (- (* 4 E) (/ (* 2 (^ E 2)) F)) (- (* 4 G) (/ (* 2 (^ G 2)) H)) I J)",
    // phi_13
    "(+ A (- (* 4 B) (/ (* 1/2 (^ B 4)) (* C D E))) (- (* 4 F) (/ (* 2 (^ F 2)) G)) (- (* 4 H) (/ (* 2 (^ H 2)) I)) J)",
    // phi_14
    "(+ (- (* 4 A) (/ (* 2 (^ A 2)) B)) (- (* 4 C) (/ (* 2 (^ C 2)) D)) (- (* 4 E) (/ (* 2 (^ E 2)) F)) (- (* 4 G) (/ (* 2 (^ G 2)) H)) I J)",
    // phi_15
    "(+ (- (* 4 A) (/ (* 2 (^ A 2)) B)) (- (* 4 C) (/ (* 1/2 (^ C 4)) (* D E F))) (- (* 4 G) (/ (* 2 (^ G 2)) H)) I J)",
    // phi_16
    "(+ A (- (* 4 B) (/ (* 1/2 (^ B 4)) (* C D E))) (- (* 4 F) (/ (* 2 (^ F 2)) G)) H I J)",
    // phi_17
    "(+ (- (* 4 A) (/ (* 1/2 (^ A 4)) (* B C D))) (- (* 4 E) (/ (* 2 (^ E 2)) F)) G H I J)",
    // phi_18
    "(+ (- (* 4 A) (/ (* 2 (^ A 2)) B)) (- (* 4 C) (/ (* 2 (^ C 2)) D)) (- (* 4 E) (/ (* 2 (^ E 2)) F)) G H I J)",
    // phi_19
    "(+ (- (* 4 A) (/ (* 2 (^ A 2)) B)) (- (* 4 C) (/ (* 2 (^ C 2)) D)) (- (* 4 E) (/ (* 2 (^ E 2)) F)) G (- (* 4 H) (/ (* 2 (^ H 2)) I)) J)",
    // phi_20
    "(+ (- (* 4 A) (/ (* 2 (^ A 2)) B)) (- (* 4 C) (/ (* 1/2 (^ C 4)) (* D E F))) G (- (* 4 H) (/ (* 2 (^ H 2)) I)) J)",
    // phi_21
    "(+ A (- (* 4 B) (/ (* 1/2 (^ B 4)) (* C D E))) F G H I J)",
    // phi_22
    "(+ A (- (* 4 B) (/ (* 2 (^ B 2)) C)) (- (* 4 D) (/ (^ D 3) (* E F))) G H I J)",
    // phi_23
    "(+ (- (* 4 A) (/ (^ A 3) (* B C))) D E F G H I J)",
    // phi_24
    "(+ (- (* 4 A) (/ (* 1/2 (^ A 4)) (* B C D))) E F G H I J)",
    // phi_25
    "(+ (- (* 4 A) (/ (* 2 (^ A 2)) B)) (- (* 4 C) (/ (* 2 (^ C 2)) D)) (- (* 4 E) (/ (* 1/2 (^ E 4)) (* F G H))) (- (* 4 I) (/ (* 2 (^ I 2)) J)))",
    // phi_26
    "(+ (- (* 4 A) (/ (* 2 (^ A 2)) B)) C (- (* 4 D) (/ (* 1/2 (^ D 4)) (* E F G))) (- (* 4 H) (/ (* 2 (^ H 2)) I)) J)",
    // phi_27
    "(+ (- (* 4 A) (/ (* 2 (^ A 2)) B)) (- (* 4 C) (/ (* 1/2 (^ C 4)) (* D E F))) (- (* 4 G) (/ (* 1/2 (^ G 4)) (* H I J))))",
    // phi_28
    "(+ (- (* 4 A) (/ (* 2 (^ A 2)) B)) (- (* 4 C) (/ (* 1/2 (^ C 4)) (* D E F))) (- (* 4 G) (/ (* 2 (^ G 2)) H)) (- (* 4 I) (/ (* 2 (^ I 2)) J)))",
    // phi_29
    "(+ A (- (* 4 B) (/ (* 2 (^ B 2)) C)) (- (* 4 D) (/ (* 1/2 (^ D 4)) (* E F G))) (- (* 4 H) (/ (* 2 (^ H 2)) I)) J)",
    // phi_30
    "(+ (- (* 4 A) (/ (* 2 (^ A 2)) B)) (- (* 4 C) (/ (* 1/2 (^ C 4)) (* D E F))) (- (* 4 G) (/ (* 2 (^ G 2)) H)) I J)",
    // phi_31
    "(+ (- (* 4 A) (/ (* 1/2 (^ A 4)) (* B C D))) (- (* 4 E) (/ (* 1/2 (^ E 4)) (* F G H))) (- (* 4 I) (/ (* 2 (^ I 2)) J)))",
    // phi_32
    "(+ (- (* 4 A) (/ (* 1/2 (^ A 4)) (* B C D))) (- (* 4 E) (/ (* 2 (^ E 2)) F)) (- (* 4 G) (/ (* 2 (^ G 2)) H)) (- (* 4 I) (/ (* 2 (^ I 2)) J)))",
    // phi_33
    "(+ A (- (* 4 B) (/ (* 2 (^ B 2)) C)) (- (* 4 D) (/ (* 1/2 (^ D 4)) (* E F G))) H I J)",
    // phi_34
    "(+ (- (* 4 A) (/ (* 1/2 (^ A 4)) (* B C D))) (- (* 4 E) (/ (* 1/2 (^ E 4)) (* F G H))) I J)",
    // phi_35
    "(+ (- (* 4 A) (/ (* 2 (^ A 2)) B)) (- (* 4 C) (/ (* 2 (^ C 2)) D)) (- (* 4 E) (/ (* 1/2 (^ E 4)) (* F G H))) I J)",
    // phi_36
    "(+ (- (* 4 A) (/ (^ A 3) (* B C))) (- (* 4 D) (/ (* 1/2 (^ D 4)) (* E F G))) (- (* 4 H) (/ (* 2 (^ H 2)) I)) J)",
    // phi_37
    "(+ A (- (* 4 B) (/ (* 2 (^ B 2)) C)) (- (* 4 D) (/ (* 2 (^ D 2)) E)) (- (* 4 F) (/ (* 2 (^ F 2)) G)) H I J)",
];

/// S_1..S_12 exactly as printed (variables X1..X10 written A..J).
const S_TEXT: [&str; 12] = [
    "(+ (- (* 4 A) (/ (* 2 (^ A 2)) B)) C D E F G H I J)",
    "(+ (- (* 4 A) (/ (* 2 (^ A 2)) B)) (- (* 4 C) (/ (* 2 (^ C 2)) D)) E F G H I J)",
    "(+ (- (* 4 A) (/ (* 2 (^ A 2)) B)) (- (* 4 C) (/ (* 2 (^ C 2)) D)) (- (* 4 E) (/ (* 2 (^ E 2)) F)) G H I J)",
    "(+ (- (* 4 A) (/ (* 2 (^ A 2)) B)) (- (* 4 C) (/ (* 2 (^ C 2)) D)) (- (* 4 E) (/ (* 2 (^ E 2)) F)) (- (* 4 G) (/ (* 2 (^ G 2)) H)) I J)",
    "(+ (- (* 4 A) (/ (^ A 3) (* B C))) D E F G H I J)",
    "(+ (- (* 4 A) (/ (^ A 3) (* B C))) (- (* 4 D) (/ (^ D 3) (* E F))) G H I J)",
    "(+ (- (* 4 A) (/ (^ A 3) (* B C))) (- (* 4 D) (/ (^ D 3) (* E F))) (- (* 4 G) (/ (^ G 3) (* H I))) J)",
    "(+ (- (* 4 A) (/ (^ A 3) (* B C))) (- (* 4 D) (/ (* 2 (^ D 2)) E)) F G H I J)",
    "(+ (- (* 4 A) (/ (* 2 (^ A 2)) B)) (- (* 4 C) (/ (* 2 (^ C 2)) D)) (- (* 4 E) (/ (^ E 3) (* F G))) H I J)",
    "(+ (- (* 4 A) (/ (* 2 (^ A 2)) B)) (- (* 4 C) (/ (* 2 (^ C 2)) D)) (- (* 4 E) (/ (* 2 (^ E 2)) F)) (- (* 4 G) (/ (^ G 3) (* H I))) J)",
    "(+ (- (* 4 A) (/ (^ A 3) (* B C))) (- (* 4 D) (/ (^ D 3) (* E F))) (- (* 4 G) (/ (* 2 (^ G 2)) H)) I J)",
    "(+ (* 4 A) (- (* (^ A 4) D E F G H I J)) D E F G H I J)",
];

/// The 88 printed weak constraints, encoded as the doubled variables of
/// each line in printed order: "B" stands for the line 2B+C+...+J >= 10.
const WEAK88_DOUBLED: [&str; 88] = [
    "B", "C", "D", "E", "F", "G", "H", "I", "J", // one 2-part
    "BD", "CE", "DF", "EG", "FH", "GI", "HJ", "BE", "CF", "DG", "EH", "FI", "GJ", "BF", "CG",
    "DH", "EI", "FJ", "BG", "CH", "DI", "EJ", "BH", "CI", "DJ", "BI", "CJ", "BJ", // two
    "BDF", "CEG", "DFH", "EGI", "FHJ", "BEG", "CFH", "DGI", "EHJ", "BDG", "CEH", "DFI", "BFH",
    "CGI", "DHJ", "BDH", "CEI", "DFJ", "BGI", "CHJ", "BDI", "CEJ", "BEH", "CFI", "DGJ", "BFI",
    "CGJ", "BEI", "CFJ", "BHJ", "BDJ", "BGJ", "BFJ", "BEJ", "EGJ", // three
    "BDFH", "CEGI", "DFHJ", "BEGI", "CFHJ", "BDGI", "CEHJ", "BDFI", "CEGJ", "BFHJ", "BDHJ",
    "BDFJ", "BEHJ", "BDGJ", "BEGJ", // four
    "BDFHJ", // five
];

#[test]
fn phi_catalog_matches_printed_formulas() {
    let c = catalog();
    for (i, text) in PHI_TEXT.iter().enumerate() {
        let expected: Expr = text.parse().expect("transcription parses");
        let got = &c.phis[i].bound;
        assert!(
            got.struct_eq(&expected),
            "phi_{}: generator produced\n  {}\nbut the printed formula is\n  {}",
            i + 1,
            got,
            expected
        );
    }
}

#[test]
fn lemma_bounds_match_printed_formulas() {
    let c = catalog();
    for (i, text) in S_TEXT.iter().enumerate() {
        let expected: Expr = text.parse().expect("transcription parses");
        assert!(
            c.lemma_bounds[i].struct_eq(&expected),
            "S_{}: generator produced\n  {}\nexpected\n  {}",
            i + 1,
            c.lemma_bounds[i],
            expected
        );
    }
}

#[test]
fn weak88_set_matches_printed_list() {
    // printed line -> set of 2-part start positions (0-based variable index)
    let printed: HashSet<Vec<usize>> = WEAK88_DOUBLED
        .iter()
        .map(|line| {
            line.chars()
                .map(|c| (c as u8 - b'A') as usize - 1) // doubled var Y means part (X,Y) starting at Y-1
                .collect()
        })
        .collect();
    assert_eq!(printed.len(), 88, "printed transcription has duplicates");

    let generated: HashSet<Vec<usize>> = compositions_12()
        .iter()
        .map(|c| {
            c.spans()
                .into_iter()
                .filter(|&(_, size)| size == 2)
                .map(|(start, _)| start)
                .collect()
        })
        .collect();
    assert_eq!(generated.len(), 88);
    assert_eq!(printed, generated, "printed weak list differs from generator");
}

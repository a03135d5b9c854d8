//! Sign-pattern cases: each of `B..J` is either `> 1` or `<= 1`, giving the
//! 512 cases in lexicographic order (`>` before `<=`, `B` most significant).
//! `A > 1` always.

use std::fmt;

/// One of the 512 cases. `greater[i]` is the flag for variable `B..J`
/// (index 0 = B): `true` means `> 1`, `false` means `<= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignPattern {
    pub greater: [bool; 9],
}

impl SignPattern {
    /// Lexicographic case number, 1..=512, matching the case table.
    pub fn case_index(&self) -> u32 {
        let mut idx = 0u32;
        for &g in &self.greater {
            idx = idx * 2 + if g { 0 } else { 1 };
        }
        idx + 1
    }

    pub fn from_case_index(index: u32) -> Option<SignPattern> {
        if !(1..=512).contains(&index) {
            return None;
        }
        let bits = index - 1;
        let mut greater = [true; 9];
        for i in 0..9 {
            greater[i] = (bits >> (8 - i)) & 1 == 0;
        }
        Some(SignPattern { greater })
    }

    /// Flag for a variable index 0..10 (A..J); A reports `true`.
    pub fn is_greater(&self, var_index: usize) -> bool {
        if var_index == 0 {
            true
        } else {
            self.greater[var_index - 1]
        }
    }

    /// All nine flags `> 1` is case 1, which cannot occur with product one.
    pub fn is_product_impossible(&self) -> bool {
        self.greater.iter().all(|&g| g)
    }

    /// Ten-character string over `>` and `<`, `A` first (`<` stands for `<= 1`).
    pub fn compact(&self) -> String {
        let mut s = String::with_capacity(10);
        s.push('>');
        for &g in &self.greater {
            s.push(if g { '>' } else { '<' });
        }
        s
    }

    pub fn from_compact(s: &str) -> Option<SignPattern> {
        let chars: Vec<char> = s.chars().collect();
        if chars.len() != 10 || chars[0] != '>' {
            return None;
        }
        let mut greater = [true; 9];
        for i in 0..9 {
            match chars[i + 1] {
                '>' => greater[i] = true,
                '<' => greater[i] = false,
                _ => return None,
            }
        }
        Some(SignPattern { greater })
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.compact())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_corner_rows() {
        let all_greater = SignPattern { greater: [true; 9] };
        assert_eq!(all_greater.case_index(), 1);
        assert!(all_greater.is_product_impossible());

        let mut row2 = [true; 9];
        row2[8] = false; // J <= 1
        assert_eq!(SignPattern { greater: row2 }.case_index(), 2);

        let all_le = SignPattern { greater: [false; 9] };
        assert_eq!(all_le.case_index(), 512);
    }

    #[test]
    fn index_round_trip() {
        for idx in 1..=512 {
            let p = SignPattern::from_case_index(idx).unwrap();
            assert_eq!(p.case_index(), idx);
        }
        assert!(SignPattern::from_case_index(0).is_none());
        assert!(SignPattern::from_case_index(513).is_none());
    }

    #[test]
    fn compact_round_trip() {
        for idx in [1, 2, 8, 121, 256, 512] {
            let p = SignPattern::from_case_index(idx).unwrap();
            assert_eq!(SignPattern::from_compact(&p.compact()), Some(p));
        }
    }
}

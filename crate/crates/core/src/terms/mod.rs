//! Scalars, generators, words, polynomials and the orders on them.

pub mod locality;
pub mod order;
pub mod parse;
pub mod poly;
pub mod scalar;
pub mod word;

pub use locality::{LocalityFn, LocalityJson};
pub use order::{compare_generators, compare_words, GenOrder, OrderSpec, WordOrder};
pub use parse::{parse_poly, parse_word, render_poly};
pub use poly::{tau_inverse, tau_shift, NcPoly};
pub use scalar::{binom_int, factorial, format_rational, gen_binom, parse_rational, rat, ratio, sign, Rational};
pub use word::{gen, Alphabet, Generator, Letter, Word};

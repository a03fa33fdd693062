//! Holds the `acceptance` test target, which checks the numerical
//! behaviour of `infoflux` end to end and prints one line per criterion.

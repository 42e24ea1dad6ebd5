"""Worst-case best-reply dynamics of a Cournot duopoly with ambiguity aversion."""

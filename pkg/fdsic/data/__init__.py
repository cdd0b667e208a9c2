from fdsic.data.symbols import gen_ofdm_like_symbols, gen_bpsk_symbols


__all__ = ["gen_ofdm_like_symbols", "gen_bpsk_symbols"]

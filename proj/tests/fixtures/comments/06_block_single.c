/* hello */ int x;

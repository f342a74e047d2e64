// has /* inside
int q; /* real */
